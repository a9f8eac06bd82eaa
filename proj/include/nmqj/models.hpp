#pragma once

// Few-level atoms coupled to a Lorentzian reservoir. Levels are labelled
// a, b, c with index 0 for |a>.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmqj/linalg.hpp"
#include "nmqj/reservoir.hpp"

namespace nmqj {

enum class ModelKind { JaynesCummings, Lambda, Vee, Ladder };

enum class LadderStart { Mixed, Excited };

std::string_view to_string(ModelKind kind);
/// Accepts "jc", "jaynes_cummings", "lambda", "vee", "v", "ladder".
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct ChannelSpec {
    int label = 0;
    Operator jump;
    std::shared_ptr<const ChannelRate> rate;
};

struct ModelSpec {
    ModelKind kind = ModelKind::JaynesCummings;
    std::size_t dim = 0;
    std::vector<std::string> basis_labels;
    std::vector<ChannelSpec> channels;
    StateVector initial_state;
    bool lamb_shift_enabled = false;

    std::vector<std::shared_ptr<const ChannelRate>> rates() const;
};

/// Optional overrides of the published parameters. Empty fields keep the
/// defaults of the chosen model.
struct ModelOverrides {
    std::optional<std::vector<double>> detunings;
    std::optional<double> coupling;
    std::optional<std::vector<Complex>> initial_amplitudes;
    std::optional<LadderStart> ladder_start;
    std::optional<bool> lamb_shift;
    /// Replace the reservoir by constant rates (Markovian MCWF limit).
    std::optional<std::vector<double>> constant_rates;
};

ModelSpec build_jaynes_cummings(const ModelOverrides& overrides = {});
ModelSpec build_lambda(const ModelOverrides& overrides = {});
ModelSpec build_vee(const ModelOverrides& overrides = {});
ModelSpec build_ladder(LadderStart start = LadderStart::Mixed,
                       const ModelOverrides& overrides = {});
ModelSpec build_model(ModelKind kind, const ModelOverrides& overrides = {});

/// H_LS(t) = sum_j lambda_j(t) C_j^dagger C_j when the Lamb shift is
/// enabled, zero otherwise. Interaction picture: no bare system term.
Operator lamb_shift_hamiltonian(const ModelSpec& model, std::span<const double> lamb_rates);

/// Right-hand side of the local-in-time master equation for given channel
/// rates (signed decay rates, Lamb-shift rates):
///   -i[H_LS, rho] + sum_j Delta_j (C_j rho C_j^dag - {C_j^dag C_j, rho} / 2).
DensityMatrix master_equation_rhs(const ModelSpec& model, const DensityMatrix& rho,
                                  std::span<const double> decay_rates,
                                  std::span<const double> lamb_rates);

/// Same, with rates evaluated from the model's channels at time t.
DensityMatrix master_equation_rhs(const ModelSpec& model, const DensityMatrix& rho, double t);

}  // namespace nmqj
