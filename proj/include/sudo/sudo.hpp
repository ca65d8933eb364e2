#pragma once

#include "sudo/bias_audit.hpp"
#include "sudo/bow.hpp"
#include "sudo/config.hpp"
#include "sudo/dataset.hpp"
#include "sudo/engine.hpp"
#include "sudo/error.hpp"
#include "sudo/matrix.hpp"
#include "sudo/metrics.hpp"
#include "sudo/oracle.hpp"
#include "sudo/probes.hpp"
#include "sudo/random.hpp"
#include "sudo/rc_curve.hpp"
#include "sudo/report.hpp"
#include "sudo/simulation.hpp"
#include "sudo/survival.hpp"
#include "sudo/text.hpp"
