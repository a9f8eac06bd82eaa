#include "nmqj/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nmqj/errors.hpp"

namespace nmqj {

namespace {

constexpr double kDarkNorm = 1e-12;

struct Branch {
    JumpDirection direction;
    std::size_t channel;
    std::size_t target;       // reverse jumps
    StateVector jumped_state; // forward jumps
    double probability;
};

struct PlannedTransfer {
    std::size_t source;
    Branch branch;
    std::int64_t members;
};

std::vector<std::int64_t> sample_multinomial(std::int64_t n, std::span<const double> probs,
                                             std::mt19937_64& gen) {
    std::vector<std::int64_t> out(probs.size(), 0);
    double remaining_mass = 1.0;
    std::int64_t remaining = n;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        if (probs[i] <= 0.0) {
            continue;
        }
        const double p = std::clamp(probs[i] / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::int64_t> dist(remaining, p);
        out[i] = p >= 1.0 ? remaining : dist(gen);
        remaining -= out[i];
        remaining_mass -= probs[i];
        if (remaining_mass <= 0.0) {
            break;
        }
    }
    return out;
}

}  // namespace

void EngineConfig::validate() const {
    if (!(dt > 0.0)) {
        throw ValidationError("engine.dt must be positive");
    }
    if (!(t_max >= 0.0)) {
        throw ValidationError("engine.t_max must be non-negative");
    }
    if (ensemble_size < 1) {
        throw ValidationError("engine.ensemble_size must be at least 1");
    }
    if (record_stride < 1) {
        throw ValidationError("engine.record_stride must be at least 1");
    }
    if (!(max_jump_prob > 0.0 && max_jump_prob <= 1.0)) {
        throw ValidationError("engine.max_jump_prob must lie in (0, 1]");
    }
}

std::size_t EngineConfig::steps() const {
    return static_cast<std::size_t>(std::llround(t_max / dt));
}

EnsembleRegistry::EnsembleRegistry(StateVector initial, std::int64_t total) : total_(total) {
    if (total < 1) {
        throw ValidationError("ensemble size must be at least 1");
    }
    entries_.push_back({normalize(initial), total, false});
}

std::size_t EnsembleRegistry::active_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.active(); }));
}

std::int64_t EnsembleRegistry::count_sum() const {
    std::int64_t s = 0;
    for (const auto& e : entries_) {
        s += e.count;
    }
    return s;
}

std::vector<std::int64_t> EnsembleRegistry::counts() const {
    std::vector<std::int64_t> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        out.push_back(e.count);
    }
    return out;
}

std::optional<std::size_t> EnsembleRegistry::find(const StateVector& state) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!entries_[i].retired && phase_equal(entries_[i].state, state, kPhaseTolerance)) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t EnsembleRegistry::find_or_add(const StateVector& state) {
    if (auto i = find(state)) {
        return *i;
    }
    entries_.push_back({state, 0, false});
    return entries_.size() - 1;
}

std::size_t EnsembleRegistry::add(StateVector state, std::int64_t count) {
    if (count < 0) {
        throw ValidationError("registry counts must be non-negative");
    }
    entries_.push_back({normalize(state), count, false});
    total_ = count_sum();
    return entries_.size() - 1;
}

void EnsembleRegistry::transfer(std::size_t from, std::size_t to, std::int64_t members) {
    auto& src = entries_.at(from);
    if (members < 0 || members > src.count) {
        std::ostringstream os;
        os << "cannot move " << members << " members out of entry " << from << " holding "
           << src.count;
        throw Error(os.str());
    }
    src.count -= members;
    entries_.at(to).count += members;
}

void EnsembleRegistry::set_state(std::size_t i, StateVector state) {
    entries_.at(i).state = std::move(state);
}

void EnsembleRegistry::merge_duplicates() {
    for (std::size_t k = 1; k < entries_.size(); ++k) {
        if (entries_[k].retired) {
            continue;
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (!entries_[i].retired &&
                phase_equal(entries_[i].state, entries_[k].state, kPhaseTolerance)) {
                entries_[i].count += entries_[k].count;
                entries_[k].count = 0;
                entries_[k].retired = true;
                break;
            }
        }
    }
}

void EnsembleRegistry::rebuild_connectivity(const ModelSpec& model) {
    connectivity_.clear();
    for (std::size_t target = 0; target < entries_.size(); ++target) {
        if (entries_[target].retired) {
            continue;
        }
        for (std::size_t j = 0; j < model.channels.size(); ++j) {
            const StateVector image = model.channels[j].jump.apply(entries_[target].state);
            if (image.norm() <= kDarkNorm) {
                continue;
            }
            const auto source = find(normalize(image));
            if (source && *source != target) {
                connectivity_[{j, *source}].push_back(target);
            }
        }
    }
}

std::span<const std::size_t> EnsembleRegistry::reverse_targets(std::size_t channel,
                                                               std::size_t source) const {
    auto it = connectivity_.find({channel, source});
    if (it == connectivity_.end()) {
        return {};
    }
    return it->second;
}

std::mt19937_64& RngStreams::stream(std::size_t entry) {
    while (streams_.size() <= entry) {
        const auto i = static_cast<std::uint64_t>(streams_.size());
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        streams_.emplace_back(seq);
    }
    return streams_[entry];
}

StateVector deterministic_step(const StateVector& v, const ModelSpec& model,
                               std::span<const double> decay_rates,
                               std::span<const double> lamb_rates, double dt) {
    // phi = v - i dt H_LS v - (dt / 2) sum_j Delta_j C_j^dag C_j v
    StateVector phi = v;
    if (model.lamb_shift_enabled) {
        const Operator h = lamb_shift_hamiltonian(model, lamb_rates);
        phi -= Complex{0.0, dt} * h.apply(v);
    }
    for (std::size_t j = 0; j < model.channels.size(); ++j) {
        if (decay_rates[j] == 0.0) {
            continue;
        }
        const auto& c = model.channels[j].jump;
        const StateVector cv = c.apply(v);
        phi -= Complex{0.5 * dt * decay_rates[j], 0.0} * c.adjoint().apply(cv);
    }
    return normalize(phi);
}

StateVector deterministic_step(const StateVector& v, double t, const ModelSpec& model,
                               double dt) {
    std::vector<double> decay(model.channels.size()), lamb(model.channels.size());
    for (std::size_t j = 0; j < model.channels.size(); ++j) {
        decay[j] = model.channels[j].rate->decay_rate(t);
        lamb[j] = model.channels[j].rate->lamb_shift_rate(t);
    }
    return deterministic_step(v, model, decay, lamb, dt);
}

double positive_jump_probability(const StateVector& v, const Operator& jump, double decay,
                                 double dt, double max_jump_prob) {
    if (decay < 0.0) {
        throw InvalidParameter("positive_jump_probability called for a negative channel");
    }
    const double weight = jump.apply(v).norm();
    const double p = decay * dt * weight * weight;
    if (p > max_jump_prob) {
        std::ostringstream os;
        os << "jump probability " << p << " exceeds " << max_jump_prob << "; reduce dt";
        throw StepTooLarge(os.str());
    }
    return p;
}

double reverse_jump_probability(const EnsembleRegistry& reg, std::size_t source,
                                std::size_t target, const Operator& jump, double decay,
                                double dt, double max_jump_prob) {
    const auto n_source = reg.entry(source).count;
    if (n_source <= 0) {
        throw SourceEmpty("reverse jump requested from an empty entry");
    }
    const auto n_target = reg.entry(target).count;
    if (n_target <= 0) {
        return 0.0;
    }
    const double weight = jump.apply(reg.entry(target).state).norm();
    const double rate_factor = std::abs(decay) * dt * weight * weight;
    if (rate_factor > max_jump_prob) {
        std::ostringstream os;
        os << "reverse jump rate factor " << rate_factor << " exceeds " << max_jump_prob
           << "; reduce dt";
        throw StepTooLarge(os.str());
    }
    return static_cast<double>(n_target) / static_cast<double>(n_source) * rate_factor;
}

DensityMatrix density_matrix(const EnsembleRegistry& reg) {
    const std::size_t d = reg.entry(0).state.dim();
    DensityMatrix rho(d);
    const double total = static_cast<double>(reg.total());
    for (const auto& e : reg.entries()) {
        if (e.count == 0) {
            continue;
        }
        rho += Complex{static_cast<double>(e.count) / total, 0.0} * outer(e.state);
    }
    return rho;
}

StepOutcome advance_step(EnsembleRegistry& reg, std::size_t step, const ModelSpec& model,
                         const EngineConfig& cfg, const RateTable& rates, RngStreams& rng) {
    const double t = static_cast<double>(step) * cfg.dt;
    const std::size_t nch = model.channels.size();
    std::vector<double> decay(nch), lamb(nch);
    for (std::size_t j = 0; j < nch; ++j) {
        decay[j] = rates.decay(j, step);
        lamb[j] = rates.lamb_shift(j, step);
    }

    StepOutcome outcome;
    std::vector<PlannedTransfer> plan;
    const std::size_t existing = reg.size();

    // Branch probabilities with counts frozen at the start of the step.
    for (std::size_t alpha = 0; alpha < existing; ++alpha) {
        const auto& entry = reg.entry(alpha);
        if (!entry.active()) {
            continue;
        }
        std::vector<Branch> branches;
        for (std::size_t j = 0; j < nch; ++j) {
            if (decay[j] <= 0.0) {
                continue;
            }
            const auto& c = model.channels[j].jump;
            const double p = positive_jump_probability(entry.state, c, decay[j], cfg.dt,
                                                       cfg.max_jump_prob);
            if (p > 0.0) {
                branches.push_back(
                    {JumpDirection::Forward, j, 0, normalize(c.apply(entry.state)), p});
            }
        }
        for (std::size_t j = 0; j < nch; ++j) {
            if (decay[j] >= 0.0) {
                continue;
            }
            for (std::size_t target : reg.reverse_targets(j, alpha)) {
                const double p = reverse_jump_probability(reg, alpha, target,
                                                          model.channels[j].jump, decay[j],
                                                          cfg.dt, cfg.max_jump_prob);
                if (p > 0.0) {
                    branches.push_back({JumpDirection::Reverse, j, target, {}, p});
                }
            }
        }
        if (branches.empty()) {
            continue;
        }
        std::vector<double> probs;
        probs.reserve(branches.size());
        double sum = 0.0;
        for (const auto& b : branches) {
            probs.push_back(b.probability);
            sum += b.probability;
        }
        if (sum > 1.0) {
            outcome.saturated = true;
            for (auto& p : probs) {
                p /= sum;
            }
        }
        const auto drawn = sample_multinomial(entry.count, probs, rng.stream(alpha));
        for (std::size_t b = 0; b < branches.size(); ++b) {
            if (drawn[b] > 0) {
                plan.push_back({alpha, std::move(branches[b]), drawn[b]});
            }
        }
    }

    // Apply all transfers together; forward targets are matched against the
    // registry at time t.
    for (auto& move : plan) {
        std::size_t target = move.branch.target;
        if (move.branch.direction == JumpDirection::Forward) {
            target = reg.find_or_add(move.branch.jumped_state);
        }
        reg.transfer(move.source, target, move.members);
        outcome.jump_events.push_back({step, t, static_cast<int>(move.branch.channel) + 1,
                                       move.branch.direction, move.source, target,
                                       move.members});
    }

    // Entries created by this step's jumps already hold C|psi(t)>/||.||.
    for (std::size_t alpha = 0; alpha < existing; ++alpha) {
        if (reg.entry(alpha).retired) {
            continue;
        }
        reg.set_state(alpha, deterministic_step(reg.entry(alpha).state, model, decay, lamb, cfg.dt));
    }
    reg.merge_duplicates();
    reg.rebuild_connectivity(model);

    for (std::size_t j = 0; j < nch; ++j) {
        if (decay[j] >= 0.0) {
            continue;
        }
        for (std::size_t source = 0; source < reg.size(); ++source) {
            if (reg.entry(source).retired || reg.entry(source).count > 0) {
                continue;
            }
            for (std::size_t target : reg.reverse_targets(j, source)) {
                if (reg.entry(target).count > 0) {
                    outcome.memory_loss = true;
                }
            }
        }
    }
    outcome.counts_after = reg.counts();
    return outcome;
}

double one_step_average_check(const EnsembleRegistry& reg_in, double t, const ModelSpec& model,
                              double dt) {
    EnsembleRegistry reg = reg_in;
    reg.rebuild_connectivity(model);
    const std::size_t nch = model.channels.size();
    std::vector<double> decay(nch), lamb(nch);
    for (std::size_t j = 0; j < nch; ++j) {
        decay[j] = model.channels[j].rate->decay_rate(t);
        lamb[j] = model.lamb_shift_enabled ? model.channels[j].rate->lamb_shift_rate(t) : 0.0;
    }

    const std::size_t d = model.dim;
    const double total = static_cast<double>(reg.total());
    DensityMatrix sigma(d);
    for (std::size_t alpha = 0; alpha < reg.size(); ++alpha) {
        const auto& entry = reg.entry(alpha);
        if (!entry.active()) {
            continue;
        }
        const double weight = static_cast<double>(entry.count) / total;
        DensityMatrix branch_sum(d);
        double jump_mass = 0.0;
        for (std::size_t j = 0; j < nch; ++j) {
            const auto& c = model.channels[j].jump;
            if (decay[j] > 0.0) {
                const StateVector cv = c.apply(entry.state);
                const double n2 = cv.norm() * cv.norm();
                if (n2 <= kDarkNorm * kDarkNorm) {
                    continue;
                }
                const double p = decay[j] * dt * n2;
                jump_mass += p;
                branch_sum += Complex{p / n2, 0.0} * outer(cv);
            } else if (decay[j] < 0.0) {
                for (std::size_t target : reg.reverse_targets(j, alpha)) {
                    const double p =
                        reverse_jump_probability(reg, alpha, target, c, decay[j], dt, 1.0e300);
                    jump_mass += p;
                    branch_sum += Complex{p, 0.0} * outer(reg.entry(target).state);
                }
            }
        }
        // Unnormalized deterministic state; |phi><phi| / ||phi||^2.
        StateVector phi = entry.state;
        if (model.lamb_shift_enabled) {
            phi -= Complex{0.0, dt} * lamb_shift_hamiltonian(model, lamb).apply(entry.state);
        }
        for (std::size_t j = 0; j < nch; ++j) {
            const auto& c = model.channels[j].jump;
            phi -= Complex{0.5 * dt * decay[j], 0.0} * c.adjoint().apply(c.apply(entry.state));
        }
        const double phi2 = phi.norm() * phi.norm();
        branch_sum += Complex{(1.0 - jump_mass) / phi2, 0.0} * outer(phi);
        sigma += Complex{weight, 0.0} * branch_sum;
    }

    const DensityMatrix rho = density_matrix(reg);
    const DensityMatrix euler =
        rho + Complex{dt, 0.0} * master_equation_rhs(model, rho, decay, lamb);
    return max_abs_diff(sigma, euler);
}

NmqjEngine::NmqjEngine(ModelSpec model, EngineConfig cfg)
    : model_(std::move(model)),
      cfg_(cfg),
      rates_(),
      reg_(model_.initial_state, cfg.ensemble_size),
      rng_(cfg.rng_seed) {
    cfg_.validate();
    const auto channel_rates = model_.rates();
    rates_ = RateTable(channel_rates, cfg_.dt, cfg_.steps());
    reg_.rebuild_connectivity(model_);
}

StepOutcome NmqjEngine::advance() {
    if (finished()) {
        throw Error("simulation already reached t_max");
    }
    auto outcome = advance_step(reg_, step_, model_, cfg_, rates_, rng_);
    ++step_;
    return outcome;
}

SimulationResult NmqjEngine::run() {
    SimulationResult result;
    auto& series = result.series;
    series.dim = model_.dim;
    const std::size_t nch = model_.channels.size();

    auto record = [&] {
        series.times.push_back(time());
        series.rho.push_back(density_matrix(reg_));
        std::vector<double> r(nch);
        for (std::size_t j = 0; j < nch; ++j) {
            r[j] = rates_.decay(j, step_);
        }
        series.rates.push_back(std::move(r));
        series.counts.push_back(reg_.counts());
        result.effective_sizes.push_back(reg_.active_count());
    };

    record();
    while (!finished()) {
        auto outcome = advance();
        if (outcome.memory_loss && !result.memory_loss_time) {
            result.memory_loss_time = time();
        }
        if (outcome.saturated && !result.saturation_time) {
            result.saturation_time = time() - cfg_.dt;
        }
        for (auto& e : outcome.jump_events) {
            series.events.push_back(e);
        }
        if (step_ % cfg_.record_stride == 0 || finished()) {
            record();
        }
    }
    const std::size_t width = reg_.size();
    for (auto& row : series.counts) {
        row.resize(width, 0);
    }
    return result;
}

}  // namespace nmqj
