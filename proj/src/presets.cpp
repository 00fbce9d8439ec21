#include "lambda_soliton/presets.hpp"

#include "lambda_soliton/error.hpp"

#include <cmath>

namespace lambda_soliton {

namespace {

ScenarioConfig base(const std::string& name)
{
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.grid.t_stride = 8;
    cfg.grid.z_stride = 4;
    cfg.outputs = {OutputKind::Fields, OutputKind::Density, OutputKind::Imprints};
    return cfg;
}

// tau_b, tau_c follow from tanh(delta / 2) = tau_manip / tau_a with delta = 5 and 10.
// Pulse centers: a encodes at T = -20, b crosses the imprint near T = 35, c arrives at T = 110.
Preset single_imprint(const std::string& name)
{
    const real tau_b = std::tanh(2.5);
    const real tau_c = std::tanh(5.0);
    Preset p;
    p.name = name;
    p.description = "type1 imprint at 0, pushed back by a type3 pulse, then forward by a type2 pulse";
    ScenarioConfig cfg = base("single-imprint");
    cfg.solitons = {SolitonSpec::type1(1.0, 0.0, 20.0), SolitonSpec::type3(tau_b, -40.0 / tau_b),
                    SolitonSpec::type2(tau_c, -110.0 / tau_c)};
    p.runs.push_back({"", cfg});
    p.snapshots = {{0.0, 1}, {60.0, 2}, {150.0, 3}};
    return p;
}

// Imprints at kappa_a x = 8 and kappa_a x = -4 (kappa_b x = -2). In the "ab" run a
// encodes first (T = -20) and b second (T = 20); "ba" reverses the order.
SolitonSpec imprint_a(bool first) { return SolitonSpec::type1(1.0, 8.0, first ? 28.0 : -12.0); }
SolitonSpec imprint_b(bool first) { return SolitonSpec::type1(0.5, -2.0, first ? 38.0 : -42.0); }

Preset two_imprints(const std::string& name)
{
    Preset p;
    p.name = name;
    p.description = "two type1 imprints (tau 1 and 0.5) encoded in either temporal order";
    ScenarioConfig ab = base("two-imprints-ab");
    ab.solitons = {imprint_a(true), imprint_b(false)};
    ScenarioConfig ba = base("two-imprints-ba");
    ba.solitons = {imprint_a(false), imprint_b(true)};
    p.runs = {{"order_ab", ab}, {"order_ba", ba}};
    p.snapshots = {{100.0, 2}};
    return p;
}

Preset controlled_pair(const std::string& name)
{
    Preset p;
    p.name = name;
    p.description = "two type1 imprints moved by one type2 pulse with tau_a > tau_c > tau_b";
    ScenarioConfig cfg = base("controlled-pair");
    cfg.solitons = {imprint_a(true), imprint_b(false), SolitonSpec::type2(0.75, -80.0)};
    p.runs.push_back({"", cfg});
    p.snapshots = {{40.0, 2}, {150.0, 3}};
    return p;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"pulse1", "den1", "pulse2", "den2", "pulse3", "den3"};
}

Preset make_preset(const std::string& name)
{
    Preset p;
    if (name == "pulse1" || name == "den1")
        p = single_imprint(name);
    else if (name == "pulse2" || name == "den2")
        p = two_imprints(name);
    else if (name == "pulse3" || name == "den3")
        p = controlled_pair(name);
    else
        throw Error(ErrorCode::UnknownPreset, "'" + name + "' (known: pulse1 den1 pulse2 den2 pulse3 den3)");
    p.emit_fields = name.starts_with("pulse");
    p.emit_density = name.starts_with("den");
    for (auto& run : p.runs) {
        run.config.outputs = {OutputKind::Imprints};
        if (p.emit_fields)
            run.config.outputs.insert(OutputKind::Fields);
        if (p.emit_density)
            run.config.outputs.insert(OutputKind::Density);
    }
    return p;
}

} // namespace lambda_soliton
