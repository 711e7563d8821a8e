#pragma once

#include "core/adversarial.hpp"
#include "core/capacity.hpp"
#include "core/chain.hpp"
#include "core/cover.hpp"
#include "core/experiments.hpp"
#include "core/loss.hpp"
#include "core/nml.hpp"

namespace predlab::experiments {

void register_core(std::vector<ExperimentDef>& out);
void register_nml_capacity(std::vector<ExperimentDef>& out);
void register_adversarial(std::vector<ExperimentDef>& out);

}  // namespace predlab::experiments
