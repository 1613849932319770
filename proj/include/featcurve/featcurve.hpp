#pragma once

// Parametric feature-curve inference for 3D point clouds: edge/corner
// detection, open and closed curve proposals, Chamfer-objective fitting,
// proposal selection, evaluation metrics, and synthetic ground-truth scenes.

#include "featcurve/core.hpp"
#include "featcurve/kdtree.hpp"
#include "featcurve/numeric.hpp"
#include "featcurve/geometry.hpp"
#include "featcurve/detection.hpp"
#include "featcurve/open_proposals.hpp"
#include "featcurve/closed_proposals.hpp"
#include "featcurve/selection.hpp"
#include "featcurve/metrics.hpp"
#include "featcurve/synthdata.hpp"
#include "featcurve/pipeline.hpp"
