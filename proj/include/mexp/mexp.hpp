#pragma once

#include "mexp/auxiliary.hpp"
#include "mexp/cheeger.hpp"
#include "mexp/cheeger_bnb.hpp"
#include "mexp/families.hpp"
#include "mexp/graph.hpp"
#include "mexp/graph_io.hpp"
#include "mexp/poincare.hpp"
#include "mexp/random.hpp"
#include "mexp/random_walk.hpp"
#include "mexp/rational.hpp"
#include "mexp/spectral.hpp"
#include "mexp/theorems.hpp"
