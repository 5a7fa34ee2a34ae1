#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "paratorus/harness/config.hpp"
#include "paratorus/paraproducts.hpp"
#include "paratorus/partition.hpp"

namespace paratorus::harness {

inline constexpr const char* kVersion = "paratorus 1.0.0";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

/// CSV with a "# config_hash=" comment line, a header row, and %.17g numbers.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& columns)
      : path_(path), os_(path, std::ios::binary), width_(columns.size()) {
    if (!os_) throw IoError("cannot write " + path.string());
    os_ << "# config_hash=" << hash << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << "\n";
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ",";
      std::visit(
          [this](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) os_ << format_double(v);
            else os_ << v;
          },
          cells[i]);
    }
    os_ << "\n";
    if (!os_) throw IoError("write failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
  std::size_t width_;
};

/// key=value record of everything that determines the outputs.
inline void write_manifest(const std::filesystem::path& dir, const RunConfig& c,
                           const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ofstream os(dir / "manifest.txt", std::ios::binary);
  if (!os) throw IoError("cannot write manifest in " + dir.string());
  os << "version=" << kVersion << "\n";
  os << "config_hash=" << config_hash(c) << "\n";
  for (const auto& [k, v] : to_kv(c)) os << k << "=" << v << "\n";
  os << "cutoff_profile=" << CutoffProfile::name() << "\n";
  os << "partition=chi(2|k|), chi(|k|/2^j) - chi(|k|/2^(j-1))\n";
  os << "time_mollifier=" << TimeMollifier::name() << "\n";
  os << "seed_mixing=splitmix64(master ^ splitmix64(index))\n";
  for (const auto& [k, v] : extra) os << k << "=" << v << "\n";
}

/// Plain gnuplot script plotting column `ycol` against `xcol` on log axes.
inline void write_gnuplot(const std::filesystem::path& script, const std::string& csv, int xcol, int ycol,
                          const std::string& title, bool logx = true, bool logy = true) {
  std::ofstream os(script, std::ios::binary);
  if (!os) throw IoError("cannot write " + script.string());
  os << "set datafile separator ','\n";
  os << "set key off\n";
  if (logx) os << "set logscale x 2\n";
  if (logy) os << "set logscale y\n";
  os << "set title '" << title << "'\n";
  os << "plot '" << csv << "' every ::2 using " << xcol << ":" << ycol << " with linespoints\n";
}

}  // namespace paratorus::harness
