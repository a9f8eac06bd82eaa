#include "nmqj/models.hpp"

#include <cmath>

#include "nmqj/errors.hpp"

namespace nmqj {

namespace {

constexpr std::size_t kA = 0;
constexpr std::size_t kB = 1;
constexpr std::size_t kC = 2;

struct Transition {
    std::size_t target;
    std::size_t source;
};

struct Defaults {
    ModelKind kind;
    std::size_t dim;
    std::vector<Transition> transitions;
    std::vector<double> detunings;
    double coupling;
    std::vector<Complex> initial;
};

ModelSpec assemble(const Defaults& def, const ModelOverrides& ov) {
    ModelSpec model;
    model.kind = def.kind;
    model.dim = def.dim;
    model.lamb_shift_enabled = ov.lamb_shift.value_or(false);
    static const char* const kLabels[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
    for (std::size_t i = 0; i < def.dim; ++i) {
        model.basis_labels.emplace_back(kLabels[i]);
    }

    const auto detunings = ov.detunings.value_or(def.detunings);
    if (detunings.size() != def.transitions.size()) {
        throw ValidationError("model " + std::string(to_string(def.kind)) + " expects " +
                              std::to_string(def.transitions.size()) + " detunings");
    }
    const double coupling = ov.coupling.value_or(def.coupling);
    if (ov.constant_rates && ov.constant_rates->size() != def.transitions.size()) {
        throw ValidationError("constant_rates must list one rate per channel");
    }

    for (std::size_t j = 0; j < def.transitions.size(); ++j) {
        ChannelSpec ch;
        ch.label = static_cast<int>(j) + 1;
        ch.jump = Operator::transition(def.dim, def.transitions[j].target, def.transitions[j].source);
        if (ov.constant_rates) {
            ch.rate = std::make_shared<ConstantChannelRate>((*ov.constant_rates)[j]);
        } else {
            ch.rate = std::make_shared<LorentzianChannelRate>(LorentzianReservoir(coupling),
                                                              detunings[j]);
        }
        model.channels.push_back(std::move(ch));
    }

    const auto amps = ov.initial_amplitudes.value_or(def.initial);
    if (amps.size() != def.dim) {
        throw ValidationError("initial state must have " + std::to_string(def.dim) +
                              " amplitudes");
    }
    try {
        model.initial_state = normalize(StateVector(amps));
    } catch (const ZeroNorm&) {
        throw ValidationError("initial state has zero norm");
    }
    return model;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::JaynesCummings:
            return "jaynes_cummings";
        case ModelKind::Lambda:
            return "lambda";
        case ModelKind::Vee:
            return "vee";
        case ModelKind::Ladder:
            return "ladder";
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    if (name == "jc" || name == "jaynes_cummings") {
        return ModelKind::JaynesCummings;
    }
    if (name == "lambda") {
        return ModelKind::Lambda;
    }
    if (name == "vee" || name == "v") {
        return ModelKind::Vee;
    }
    if (name == "ladder") {
        return ModelKind::Ladder;
    }
    return std::nullopt;
}

std::vector<std::shared_ptr<const ChannelRate>> ModelSpec::rates() const {
    std::vector<std::shared_ptr<const ChannelRate>> out;
    out.reserve(channels.size());
    for (const auto& ch : channels) {
        out.push_back(ch.rate);
    }
    return out;
}

ModelSpec build_jaynes_cummings(const ModelOverrides& overrides) {
    return assemble({ModelKind::JaynesCummings, 2, {{kB, kA}}, {5.0}, 5.0, {3.0, 2.0}},
                    overrides);
}

ModelSpec build_lambda(const ModelOverrides& overrides) {
    return assemble({ModelKind::Lambda,
                     3,
                     {{kB, kA}, {kC, kA}},
                     {-3.0, 5.0},
                     2.0,
                     {4.0, 2.0, 1.0}},
                    overrides);
}

ModelSpec build_vee(const ModelOverrides& overrides) {
    return assemble(
        {ModelKind::Vee, 3, {{kC, kA}, {kC, kB}}, {-3.0, 5.0}, 2.0, {1.0, 1.0, 1.0}},
        overrides);
}

ModelSpec build_ladder(LadderStart start, const ModelOverrides& overrides) {
    std::vector<Complex> initial = start == LadderStart::Excited
                                       ? std::vector<Complex>{1.0, 0.0, 0.0}
                                       : std::vector<Complex>{4.0, 2.0, 1.0};
    return assemble(
        {ModelKind::Ladder, 3, {{kB, kA}, {kC, kB}}, {-3.0, 5.0}, 2.0, std::move(initial)},
        overrides);
}

ModelSpec build_model(ModelKind kind, const ModelOverrides& overrides) {
    switch (kind) {
        case ModelKind::JaynesCummings:
            return build_jaynes_cummings(overrides);
        case ModelKind::Lambda:
            return build_lambda(overrides);
        case ModelKind::Vee:
            return build_vee(overrides);
        case ModelKind::Ladder:
            return build_ladder(overrides.ladder_start.value_or(LadderStart::Mixed), overrides);
    }
    throw UnsupportedModel("unknown model kind");
}

Operator lamb_shift_hamiltonian(const ModelSpec& model, std::span<const double> lamb_rates) {
    Operator h(model.dim);
    if (!model.lamb_shift_enabled) {
        return h;
    }
    for (std::size_t j = 0; j < model.channels.size(); ++j) {
        const auto& c = model.channels[j].jump;
        h += Complex{lamb_rates[j], 0.0} * (c.adjoint() * c);
    }
    return h;
}

DensityMatrix master_equation_rhs(const ModelSpec& model, const DensityMatrix& rho,
                                  std::span<const double> decay_rates,
                                  std::span<const double> lamb_rates) {
    const Complex minus_i{0.0, -1.0};
    DensityMatrix out = minus_i * commutator(lamb_shift_hamiltonian(model, lamb_rates), rho);
    for (std::size_t j = 0; j < model.channels.size(); ++j) {
        const auto& c = model.channels[j].jump;
        const Matrix cdag = c.adjoint();
        const Matrix sandwich = c * rho * cdag;
        const Matrix anti = anticommutator(cdag * c, rho);
        out += Complex{decay_rates[j], 0.0} * (sandwich - Complex{0.5, 0.0} * anti);
    }
    return out;
}

DensityMatrix master_equation_rhs(const ModelSpec& model, const DensityMatrix& rho, double t) {
    std::vector<double> decay(model.channels.size()), lamb(model.channels.size());
    for (std::size_t j = 0; j < model.channels.size(); ++j) {
        decay[j] = model.channels[j].rate->decay_rate(t);
        lamb[j] = model.lamb_shift_enabled ? model.channels[j].rate->lamb_shift_rate(t) : 0.0;
    }
    return master_equation_rhs(model, rho, decay, lamb);
}

}  // namespace nmqj
