#pragma once

#include "trimer/errors.hpp"
#include "trimer/model.hpp"
#include "trimer/cpt.hpp"
#include "trimer/ode.hpp"
#include "trimer/integrator.hpp"
#include "trimer/linalg.hpp"
#include "trimer/parallel.hpp"
#include "trimer/stability.hpp"
#include "trimer/sweep.hpp"
#include "trimer/scenario.hpp"
#include "trimer/export.hpp"
#include "trimer/pipeline.hpp"
