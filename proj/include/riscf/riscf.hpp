#pragma once

#include <riscf/active_bf.hpp>
#include <riscf/baselines.hpp>
#include <riscf/channel.hpp>
#include <riscf/config_io.hpp>
#include <riscf/error.hpp>
#include <riscf/experiments.hpp>
#include <riscf/linalg.hpp>
#include <riscf/orchestrator.hpp>
#include <riscf/parallel.hpp>
#include <riscf/passive_bf.hpp>
#include <riscf/rng.hpp>
#include <riscf/scenario.hpp>
#include <riscf/signaling.hpp>
#include <riscf/verify.hpp>
#include <riscf/wmmse.hpp>
