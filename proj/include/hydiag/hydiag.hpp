#pragma once

#include "hydiag/diagnosability.hpp"
#include "hydiag/diagnoser.hpp"
#include "hydiag/error.hpp"
#include "hydiag/estimator.hpp"
#include "hydiag/generator.hpp"
#include "hydiag/graph.hpp"
#include "hydiag/ids.hpp"
#include "hydiag/model_io.hpp"
#include "hydiag/oracle.hpp"
#include "hydiag/quotient_model.hpp"
#include "hydiag/regions.hpp"
#include "hydiag/timed_automaton.hpp"
