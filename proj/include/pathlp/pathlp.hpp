#pragma once

#include "pathlp/dense_matrix.hpp"
#include "pathlp/errors.hpp"
#include "pathlp/initializer.hpp"
#include "pathlp/instance_gen.hpp"
#include "pathlp/instance_io.hpp"
#include "pathlp/inverse_maintenance.hpp"
#include "pathlp/l2_step.hpp"
#include "pathlp/linalg.hpp"
#include "pathlp/lp.hpp"
#include "pathlp/newton.hpp"
#include "pathlp/potential.hpp"
#include "pathlp/robust_step.hpp"
#include "pathlp/shadow_vector.hpp"
#include "pathlp/solver.hpp"
#include "pathlp/trace.hpp"
#include "pathlp/vector_ops.hpp"
