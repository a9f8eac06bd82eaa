#pragma once

// Non-Markovian quantum jump unraveling of a local-in-time master equation.
//
// The ensemble is stored as an effective registry: one state vector per
// physically distinct pure state plus an integer occupation count. Members
// are not tracked individually. Positive channels jump forward as in the
// Markovian Monte Carlo wave function method; negative channels move
// members back to the registry entries they could have come from, with a
// probability proportional to the target's occupation.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "nmqj/linalg.hpp"
#include "nmqj/models.hpp"
#include "nmqj/reservoir.hpp"
#include "nmqj/series.hpp"

namespace nmqj {

struct EngineConfig {
    double dt = 0.01;
    double t_max = 6.0;
    std::int64_t ensemble_size = 100000;
    std::uint64_t rng_seed = 0;
    std::size_t record_stride = 10;
    double max_jump_prob = 0.1;

    /// Throws ValidationError.
    void validate() const;
    std::size_t steps() const;
};

struct RegistryEntry {
    StateVector state;
    std::int64_t count = 0;
    /// Merged into an earlier entry holding the same state; never matched again.
    bool retired = false;

    bool active() const { return count > 0 && !retired; }
};

class EnsembleRegistry {
  public:
    EnsembleRegistry(StateVector initial, std::int64_t total);

    std::size_t size() const { return entries_.size(); }
    std::int64_t total() const { return total_; }
    const RegistryEntry& entry(std::size_t i) const { return entries_.at(i); }
    std::span<const RegistryEntry> entries() const { return entries_; }

    /// Number of active entries (N_eff).
    std::size_t active_count() const;
    std::int64_t count_sum() const;
    std::vector<std::int64_t> counts() const;

    /// Lowest-index non-retired entry phase-equal to `state`.
    std::optional<std::size_t> find(const StateVector& state) const;
    /// Existing match, or a new entry with zero count.
    std::size_t find_or_add(const StateVector& state);
    /// Adds an entry without deduplication; for assembling test ensembles.
    std::size_t add(StateVector state, std::int64_t count);

    void transfer(std::size_t from, std::size_t to, std::int64_t members);
    void set_state(std::size_t i, StateVector state);

    /// Folds every entry that became phase-equal to an earlier one into it.
    void merge_duplicates();

    /// Recomputes reverse-jump targets: alpha' is a target of source alpha
    /// via channel j when normalize(C_j psi_alpha') is phase-equal to psi_alpha.
    void rebuild_connectivity(const ModelSpec& model);
    /// Targets of `source` via channel index `channel` (0-based), ascending.
    std::span<const std::size_t> reverse_targets(std::size_t channel, std::size_t source) const;

  private:
    std::vector<RegistryEntry> entries_;
    std::int64_t total_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> connectivity_;
};

/// Independent per-entry random streams derived from one master seed.
/// Stream i is an mt19937_64 seeded with seed_seq{seed_lo, seed_hi, i_lo, i_hi},
/// where i is the registry insertion index.
class RngStreams {
  public:
    explicit RngStreams(std::uint64_t seed) : seed_(seed) {}
    std::mt19937_64& stream(std::size_t entry);

  private:
    std::uint64_t seed_;
    std::vector<std::mt19937_64> streams_;
};

struct StepOutcome {
    std::vector<JumpEvent> jump_events;
    std::vector<std::int64_t> counts_after;
    /// Some source's reverse-jump probabilities summed above one and were
    /// rescaled: the source ran out of members before its channel turned.
    bool saturated = false;
    /// After the step, a source entry is empty while a negative channel still
    /// demands flow out of it towards an occupied target.
    bool memory_loss = false;
};

/// One explicit Euler step (1 - i H dt)|v> with the non-Hermitian
/// H = H_LS - (i/2) sum_j Delta_j C_j^dag C_j (signed rates), renormalized.
StateVector deterministic_step(const StateVector& v, const ModelSpec& model,
                               std::span<const double> decay_rates,
                               std::span<const double> lamb_rates, double dt);
StateVector deterministic_step(const StateVector& v, double t, const ModelSpec& model,
                               double dt);

/// Delta dt <v|C^dag C|v>. Requires decay >= 0. Throws StepTooLarge above
/// max_jump_prob.
double positive_jump_probability(const StateVector& v, const Operator& jump, double decay,
                                 double dt, double max_jump_prob = 0.1);

/// (N_target / N_source) |Delta| dt <psi_target|C^dag C|psi_target>.
/// Zero when the target is empty; SourceEmpty when the source is.
/// StepTooLarge applies to the rate factor |Delta| dt <C^dag C>; the count
/// ratio may push the value above max_jump_prob when the source is nearly
/// exhausted.
double reverse_jump_probability(const EnsembleRegistry& reg, std::size_t source,
                                std::size_t target, const Operator& jump, double decay,
                                double dt, double max_jump_prob = 0.1);

/// sum_alpha (N_alpha / N) |psi_alpha><psi_alpha|
DensityMatrix density_matrix(const EnsembleRegistry& reg);

/// Samples one step at t = step * dt. Counts are frozen while branch
/// probabilities are evaluated; transfers are applied together, then every
/// pre-existing entry is propagated, duplicates merged and connectivity
/// rebuilt.
StepOutcome advance_step(EnsembleRegistry& reg, std::size_t step, const ModelSpec& model,
                         const EngineConfig& cfg, const RateTable& rates, RngStreams& rng);

/// Exact expectation of one step (every branch weighted by its probability)
/// compared with an explicit Euler step of the master equation:
/// max_ij |sigma(t + dt) - rho(t) - dt L[rho(t)]|.
double one_step_average_check(const EnsembleRegistry& reg, double t, const ModelSpec& model,
                              double dt);

struct SimulationResult {
    TrajectorySeries series;
    /// N_eff at every recorded time.
    std::vector<std::size_t> effective_sizes;
    std::optional<double> memory_loss_time;
    std::optional<double> saturation_time;
};

class NmqjEngine {
  public:
    NmqjEngine(ModelSpec model, EngineConfig cfg);

    const ModelSpec& model() const { return model_; }
    const EngineConfig& config() const { return cfg_; }
    const EnsembleRegistry& registry() const { return reg_; }
    const RateTable& rates() const { return rates_; }
    std::size_t step_index() const { return step_; }
    double time() const { return static_cast<double>(step_) * cfg_.dt; }
    bool finished() const { return step_ >= cfg_.steps(); }

    StepOutcome advance();

    /// Runs to t_max, recording every record_stride steps (and t = 0, t_max).
    SimulationResult run();

  private:
    ModelSpec model_;
    EngineConfig cfg_;
    RateTable rates_;
    EnsembleRegistry reg_;
    RngStreams rng_;
    std::size_t step_ = 0;
};

}  // namespace nmqj
