#pragma once

// Umbrella header: constrained stochastic resource allocation for
// free-space-optical links -- channel model, scenario programs, the
// model-based dual-gradient solver, the model-free primal-dual learner,
// baselines, and the experiment harness.

#include "fso/baselines.hpp"
#include "fso/channel.hpp"
#include "fso/checkpoint.hpp"
#include "fso/config.hpp"
#include "fso/harness.hpp"
#include "fso/mlp.hpp"
#include "fso/oracle.hpp"
#include "fso/pddl.hpp"
#include "fso/policy.hpp"
#include "fso/program.hpp"
#include "fso/rng.hpp"
#include "fso/scenarios/fronthaul.hpp"
#include "fso/scenarios/joint_relay.hpp"
#include "fso/scenarios/relay.hpp"
#include "fso/scenarios/rofso.hpp"
#include "fso/sdg.hpp"
#include "fso/trace.hpp"
