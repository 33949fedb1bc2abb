#pragma once

#include "relest/em.hpp"
#include "relest/estimators.hpp"
#include "relest/experiments.hpp"
#include "relest/graph.hpp"
#include "relest/io.hpp"
#include "relest/l0.hpp"
#include "relest/linalg.hpp"
#include "relest/metrics.hpp"
#include "relest/noisegen.hpp"
#include "relest/objectives.hpp"
#include "relest/random.hpp"
#include "relest/result.hpp"
#include "relest/simnet.hpp"
