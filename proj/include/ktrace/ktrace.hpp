#pragma once

#include "ktrace/errors.hpp"
#include "ktrace/matrix_core.hpp"
#include "ktrace/algebra_model.hpp"
#include "ktrace/projection_calculus.hpp"
#include "ktrace/random_elements.hpp"
#include "ktrace/limit_report.hpp"
#include "ktrace/weight_pairing.hpp"
#include "ktrace/regularization.hpp"
#include "ktrace/dimension_group.hpp"
#include "ktrace/singular_traces.hpp"
#include "ktrace/json_io.hpp"
#include "ktrace/verification.hpp"
#include "ktrace/verification_cases.hpp"
