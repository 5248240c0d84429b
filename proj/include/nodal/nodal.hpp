#pragma once

#include "nodal/rng.hpp"
#include "nodal/random_fields.hpp"
#include "nodal/cubical.hpp"
#include "nodal/homology.hpp"
#include "nodal/patterns.hpp"
#include "nodal/admissibility.hpp"
#include "nodal/bounds.hpp"
#include "nodal/orthant.hpp"
#include "nodal/experiments.hpp"
