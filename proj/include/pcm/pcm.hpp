#pragma once

// Umbrella header: spanning-tree inconsistency indices for pairwise
// comparison matrices, including the classical indices and the Monte
// Carlo study over random matrices.

#include "pcm/errors.hpp"
#include "pcm/graph.hpp"
#include "pcm/indices.hpp"
#include "pcm/matrix.hpp"
#include "pcm/montecarlo.hpp"
#include "pcm/weights.hpp"
