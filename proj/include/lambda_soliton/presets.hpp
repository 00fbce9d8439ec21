#ifndef LAMBDA_SOLITON_PRESETS_HPP
#define LAMBDA_SOLITON_PRESETS_HPP

#include "lambda_soliton/scenario.hpp"

#include <string>
#include <vector>

namespace lambda_soliton {

/// A time (units of tau_ref) at which ground-state profiles are recorded, and how
/// many leading solitons of the sequence have acted by then.
struct Snapshot {
    real t = 0.0;
    std::size_t active = 0;
};

struct PresetRun {
    std::string label;
    ScenarioConfig config;
};

struct Preset {
    std::string name;
    std::string description;
    /// One run, or two runs that differ only in the temporal order of the encodings.
    std::vector<PresetRun> runs;
    std::vector<Snapshot> snapshots;
    bool emit_fields = false;
    bool emit_density = false;
};

/// pulse1, den1: one imprint moved by a type3 then a type2 pulse (locations 0, -5, +5).
/// pulse2, den2: two type1 imprints, encoded in either temporal order.
/// pulse3, den3: the two imprints of pulse2 moved by one type2 pulse, tau_a > tau_c > tau_b.
/// Throws UnknownPreset.
Preset make_preset(const std::string& name);

std::vector<std::string> preset_names();

} // namespace lambda_soliton

#endif
