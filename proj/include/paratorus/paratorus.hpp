#pragma once

#include "paratorus/errors.hpp"
#include "paratorus/grid.hpp"
#include "paratorus/fft.hpp"
#include "paratorus/field.hpp"
#include "paratorus/partition.hpp"
#include "paratorus/spectral.hpp"
#include "paratorus/trajectory.hpp"
#include "paratorus/snapshot.hpp"
#include "paratorus/nonlinear.hpp"
#include "paratorus/paraproducts.hpp"
#include "paratorus/symbols.hpp"
#include "paratorus/parallel.hpp"
#include "paratorus/noise.hpp"
#include "paratorus/renorm.hpp"
#include "paratorus/solver.hpp"
#include "paratorus/estimates.hpp"
