#include "experiments/registry_internal.hpp"

namespace predlab {

const std::vector<ExperimentDef>& experiment_registry() {
  static const std::vector<ExperimentDef> defs = [] {
    std::vector<ExperimentDef> out;
    experiments::register_core(out);
    experiments::register_nml_capacity(out);
    experiments::register_adversarial(out);
    for (auto& def : out)
      def.example_config = "# " + def.id + ": " + def.line + "\n" + def.example_config;
    return out;
  }();
  return defs;
}

}  // namespace predlab
