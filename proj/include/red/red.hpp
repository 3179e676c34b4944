#pragma once

// Umbrella header for the RED scheduling library: DAG task model,
// intermediate deadline assignment, MIMONet-aware structure refinement,
// EDF dispatch with runtime re-assignment, the discrete-event simulator,
// trace metrics, and the benchmark scenario generators.

#include "red/bench.hpp"
#include "red/builtins.hpp"
#include "red/dag.hpp"
#include "red/deadline.hpp"
#include "red/engine.hpp"
#include "red/exec_model.hpp"
#include "red/metrics.hpp"
#include "red/refine.hpp"
#include "red/report_io.hpp"
#include "red/scenario.hpp"
#include "red/scenario_io.hpp"
#include "red/scheduler.hpp"
#include "red/time.hpp"
#include "red/trace.hpp"
#include "red/trace_checks.hpp"
#include "red/trace_io.hpp"
