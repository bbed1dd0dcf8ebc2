#pragma once

#include "graphonlab/discretize.hpp"
#include "graphonlab/distribution.hpp"
#include "graphonlab/error.hpp"
#include "graphonlab/exact_sum.hpp"
#include "graphonlab/functionals.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/grid_io.hpp"
#include "graphonlab/io.hpp"
#include "graphonlab/measure_map.hpp"
#include "graphonlab/metrics.hpp"
#include "graphonlab/parallel.hpp"
#include "graphonlab/rational.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/sample.hpp"
#include "graphonlab/transform.hpp"
#include "graphonlab/verify.hpp"
