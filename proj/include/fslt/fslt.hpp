#pragma once

#include "fslt/types.hpp"
#include "fslt/hilbert.hpp"
#include "fslt/hamiltonians.hpp"
#include "fslt/integrator.hpp"
#include "fslt/dynamics.hpp"
#include "fslt/topology.hpp"
#include "fslt/states.hpp"
#include "fslt/parallel.hpp"
#include "fslt/experiments.hpp"
#include "fslt/config.hpp"
#include "fslt/io.hpp"
#include "fslt/scenarios.hpp"
#include "fslt/selftest.hpp"
