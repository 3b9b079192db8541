#pragma once

// Umbrella header for the Dirichlet-series laboratory.

#include "dvlab/bloch.hpp"
#include "dvlab/catalog.hpp"
#include "dvlab/character.hpp"
#include "dvlab/dirichlet_series.hpp"
#include "dvlab/experiments.hpp"
#include "dvlab/functionals.hpp"
#include "dvlab/io.hpp"
#include "dvlab/measure.hpp"
#include "dvlab/measure_json.hpp"
#include "dvlab/norms.hpp"
#include "dvlab/polydisc.hpp"
#include "dvlab/polydisc_polynomial.hpp"
#include "dvlab/primes.hpp"
#include "dvlab/quadrature.hpp"
#include "dvlab/random.hpp"
#include "dvlab/volterra.hpp"
#include "dvlab/weight_table.hpp"
#include "dvlab/zeta.hpp"
