#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adngcl/contrastive.hpp"

namespace adngcl {

// Ratio triples are conventionally written (easy, hard, inter); internally
// everything is indexed by Category (hard=0, inter=1, easy=2).
constexpr std::array<double, num_categories> make_ratios(double r_easy, double r_hard,
                                                         double r_inter) {
    return {r_hard, r_inter, r_easy};
}

struct HansConfig {
    double theta_max = 0.6;  // global budget: max fraction of candidates ever active
    std::array<double, num_categories> ratios = make_ratios(0.1, 0.3, 0.6);
    std::uint32_t t_init = 60;      // warm-up epochs before any adaptive step
    std::uint32_t t_interval = 20;  // epochs between scheduling checkpoints
    std::uint32_t window = 10;      // loss-window length in epochs ("e")
    double gamma = 0.99;            // gate factor: step only if loss improved < 1%
    double step_scale = 0.05;       // base step scale ("b")
    double step_cap = 0.10;         // per-step cap per category ("c_cat")
    double eta_floor = 0.05;
    std::uint32_t swap_interval = 20;
    std::uint64_t seed = 0;

    double cat_budget(Category c) const { return ratios[c] * theta_max; }

    // theta_max = 0 is accepted as an explicit "no negatives" degenerate mode.
    void validate() const;
};

// Consumption state: what fraction of each category's fixed budget is in
// use, the round-robin position, and the per-epoch loss record the gate
// reads. Budget geometry is frozen in at warm-up so the ledger is
// self-contained.
struct BudgetLedger {
    std::array<double, num_categories> eta{};
    int cursor = cat_hard;
    bool saturated = false;
    std::uint64_t epoch = 0;
    std::array<std::vector<double>, num_categories> loss_history;

    double theta_max = 0.0;
    std::array<double, num_categories> theta_cat{};

    double budget_used() const {
        double s = 0.0;
        for (std::size_t c = 0; c < num_categories; ++c) s += eta[c] * theta_cat[c];
        return s;
    }
};

// Per-anchor candidate partition by similarity rank, each pool stored in
// descending-similarity order (ties broken by ascending index upstream).
struct NegativePools {
    std::array<std::vector<std::vector<std::uint32_t>>, num_categories> pools;
    std::size_t n = 0;

    std::size_t pool_size(Category c) const {
        return pools[c].empty() ? 0 : pools[c][0].size();
    }
};

// Fills `row` (resized to n) with s(anchor, j) for every j; the j == anchor
// entry is ignored.
using SimRowFn = std::function<void(std::size_t anchor, std::vector<double>& row)>;

// eta = 0.05 across categories, cursor at hard, empty history.
BudgetLedger warmup_state(const HansConfig& cfg);

// Per category: fires iff the sum of the last `window` losses is >= gamma
// times the sum of the `window` before that (i.e. loss failed to improve).
// Requires at least 2*window recorded epochs.
std::array<bool, num_categories> gate_check(
    const std::array<std::vector<double>, num_categories>& history, std::size_t window,
    double gamma);

// Loss shares if all three window losses are positive, otherwise the
// nominal weights (hard, inter, easy) = (0.4, 0.4, 0.2).
std::array<double, num_categories> loss_weights(
    const std::array<double, num_categories>& window_losses);

// min{ b*w, c_cat, 1 - eta_cat, remaining-budget / cat-budget }, >= 0.
double step_size(const BudgetLedger& led, const HansConfig& cfg, Category c, double w);

// eta_cat += d_eta; sets the saturated flag once the global budget is used up.
void apply_step(BudgetLedger& led, Category c, double d_eta);

// One call per epoch: records that epoch's per-category losses, and at
// checkpoints (epoch > t_init, epoch % t_interval == 0, not yet saturated)
// runs gate -> floors -> hard-preferred round-robin selection -> one step.
void scheduler_tick(BudgetLedger& led, const HansConfig& cfg, std::uint64_t epoch,
                    const std::array<double, num_categories>& epoch_losses);

// Sorts each anchor's candidates by descending similarity (ties: ascending
// index); top round(r_hard*(n-1)) are hard, bottom round(r_easy*(n-1)) easy,
// middle inter. Requires n >= 4.
NegativePools stratify(const SimRowFn& sim_row, std::size_t n,
                       const std::array<double, num_categories>& ratios);

// Ledger-implied active-set size for one anchor:
// floor(eta * cat_budget * (n-1)), capped at the pool size, with a minimum
// of one for a nonempty pool when eta and the category budget are both
// positive (otherwise small graphs would schedule nothing at warm-up).
std::size_t expected_active_count(const BudgetLedger& led, Category c, std::size_t n,
                                  std::size_t pool_size);

// Uniform sample without replacement from each pool at the ledger-implied
// size; per-anchor substream derived from (cfg.seed, epoch, anchor).
ActiveNegatives draw_active(const NegativePools& pools, const BudgetLedger& led,
                            const HansConfig& cfg, std::uint64_t epoch);

// Post-saturation re-sample: every active set replaced by a fresh uniform
// draw of identical size from its pool. Errors if the ledger is not
// saturated yet.
ActiveNegatives swap_active(const NegativePools& pools, const ActiveNegatives& current,
                            const BudgetLedger& led, const HansConfig& cfg,
                            std::uint64_t epoch);

// Flat JSON object: eta per category, cursor, saturated, epoch.
std::string ledger_to_json(const BudgetLedger& led);
// Restores the serialized fields on top of warmup_state(cfg); the loss
// history is not part of the wire format.
BudgetLedger ledger_from_json(const std::string& text, const HansConfig& cfg);

}  // namespace adngcl
