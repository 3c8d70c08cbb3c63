#include "adngcl/hans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "adngcl/errors.hpp"
#include "adngcl/rng.hpp"

using json = nlohmann::json;

namespace adngcl {

namespace {
constexpr double kSatEps = 1e-12;
}

void HansConfig::validate() const {
    if (!(theta_max >= 0.0 && theta_max <= 1.0))
        throw config_error("theta_max must lie in [0,1]");
    double rsum = 0.0;
    for (double r : ratios) {
        if (r < 0.0) throw config_error("category ratios must be nonnegative");
        rsum += r;
    }
    if (std::abs(rsum - 1.0) > 1e-9) throw config_error("category ratios must sum to 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw config_error("gamma must lie in (0,1]");
    if (window == 0) throw config_error("loss window must be at least 1 epoch");
    if (2 * window > t_init)
        throw config_error("warm-up must cover two loss windows (2*e <= t_init)");
    if (t_interval == 0) throw config_error("t_interval must be positive");
    if (swap_interval == 0) throw config_error("swap_interval must be positive");
    if (step_scale <= 0.0) throw config_error("step scale b must be positive");
    if (step_cap <= 0.0) throw config_error("step cap c_cat must be positive");
    if (!(eta_floor >= 0.0 && eta_floor <= 1.0)) throw config_error("eta_floor must lie in [0,1]");
}

BudgetLedger warmup_state(const HansConfig& cfg) {
    BudgetLedger led;
    led.eta = {0.05, 0.05, 0.05};
    led.cursor = cat_hard;
    led.epoch = 0;
    led.theta_max = cfg.theta_max;
    for (std::size_t c = 0; c < num_categories; ++c)
        led.theta_cat[c] = cfg.ratios[c] * cfg.theta_max;
    led.saturated = led.budget_used() >= led.theta_max - kSatEps;
    return led;
}

namespace {

double tail_sum(const std::vector<double>& v, std::size_t count, std::size_t back_off) {
    double s = 0.0;
    const std::size_t end = v.size() - back_off;
    for (std::size_t k = end - count; k < end; ++k) s += v[k];
    return s;
}

}  // namespace

std::array<bool, num_categories> gate_check(
    const std::array<std::vector<double>, num_categories>& history, std::size_t window,
    double gamma) {
    for (const auto& h : history)
        if (h.size() < 2 * window)
            throw config_error("gate_check: need two full loss windows of history");

    std::array<bool, num_categories> fired{};
    for (std::size_t c = 0; c < num_categories; ++c) {
        const double curr = tail_sum(history[c], window, 0);
        const double prev = tail_sum(history[c], window, window);
        fired[c] = curr >= gamma * prev;
    }
    return fired;
}

std::array<double, num_categories> loss_weights(
    const std::array<double, num_categories>& window_losses) {
    bool all_positive = true;
    double total = 0.0;
    for (double l : window_losses) {
        if (l <= 0.0) all_positive = false;
        total += l;
    }
    if (!all_positive) {
        std::array<double, num_categories> w{};
        w[cat_hard] = 0.4;
        w[cat_inter] = 0.4;
        w[cat_easy] = 0.2;
        return w;
    }
    std::array<double, num_categories> w{};
    for (std::size_t c = 0; c < num_categories; ++c) w[c] = window_losses[c] / total;
    return w;
}

double step_size(const BudgetLedger& led, const HansConfig& cfg, Category c, double w) {
    if (led.theta_cat[c] <= 0.0)
        throw config_error("step_size: category has no budget to grow into");
    const double u1 = cfg.step_scale * w;
    const double u2 = cfg.step_cap;
    const double u3 = 1.0 - led.eta[c];
    const double u4 = (led.theta_max - led.budget_used()) / led.theta_cat[c];
    return std::max(0.0, std::min(std::min(u1, u2), std::min(u3, u4)));
}

void apply_step(BudgetLedger& led, Category c, double d_eta) {
    led.eta[c] = std::min(1.0, led.eta[c] + d_eta);
    if (led.budget_used() >= led.theta_max - kSatEps) led.saturated = true;
}

void scheduler_tick(BudgetLedger& led, const HansConfig& cfg, std::uint64_t epoch,
                    const std::array<double, num_categories>& epoch_losses) {
    for (std::size_t c = 0; c < num_categories; ++c)
        led.loss_history[c].push_back(epoch_losses[c]);
    led.epoch = epoch;

    if (led.saturated) return;
    if (epoch <= cfg.t_init) return;
    if (epoch % cfg.t_interval != 0) return;

    const auto fired = gate_check(led.loss_history, cfg.window, cfg.gamma);
    if (!fired[0] && !fired[1] && !fired[2]) return;  // every loss still improving

    // starvation floors, applied only when an adaptive update is due
    for (std::size_t c = 0; c < num_categories; ++c)
        if (led.eta[c] < cfg.eta_floor) led.eta[c] = cfg.eta_floor;

    auto eligible = [&](std::size_t c) {
        return fired[c] && led.eta[c] < 1.0 && led.theta_cat[c] > 0.0;
    };

    int selected = -1;
    if (eligible(cat_hard)) {
        selected = cat_hard;  // hard-preference: hard wins whenever it can grow
    } else {
        for (std::size_t k = 0; k < num_categories; ++k) {
            const std::size_t c = (static_cast<std::size_t>(led.cursor) + k) % num_categories;
            if (eligible(c)) {
                selected = static_cast<int>(c);
                break;
            }
        }
    }
    if (selected < 0) {
        // floors may have tipped the ledger over the line
        if (led.budget_used() >= led.theta_max - kSatEps) led.saturated = true;
        return;
    }

    std::array<double, num_categories> window_losses{};
    for (std::size_t c = 0; c < num_categories; ++c)
        window_losses[c] = tail_sum(led.loss_history[c], cfg.window, 0);
    const auto w = loss_weights(window_losses);

    const double d = step_size(led, cfg, static_cast<Category>(selected), w[selected]);
    apply_step(led, static_cast<Category>(selected), d);
    led.cursor = (selected + 1) % static_cast<int>(num_categories);
}

NegativePools stratify(const SimRowFn& sim_row, std::size_t n,
                       const std::array<double, num_categories>& ratios) {
    if (n < 4) throw config_error("stratify: need at least 4 nodes for three pools");

    const std::size_t m = n - 1;
    auto rounded = [m](double r) {
        const long k = std::lround(r * static_cast<double>(m));
        return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(m)));
    };
    const std::size_t k_hard = rounded(ratios[cat_hard]);
    const std::size_t k_easy = std::min(rounded(ratios[cat_easy]), m - k_hard);
    const std::size_t k_inter = m - k_hard - k_easy;

    NegativePools p;
    p.n = n;
    for (auto& pool : p.pools) pool.resize(n);

    std::vector<double> row;
    std::vector<std::uint32_t> order(m);
    for (std::size_t i = 0; i < n; ++i) {
        sim_row(i, row);
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order[w++] = static_cast<std::uint32_t>(j);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (row[a] != row[b]) return row[a] > row[b];
            return a < b;
        });

        p.pools[cat_hard][i].assign(order.begin(), order.begin() + k_hard);
        p.pools[cat_inter][i].assign(order.begin() + k_hard, order.begin() + k_hard + k_inter);
        p.pools[cat_easy][i].assign(order.begin() + k_hard + k_inter, order.end());
    }
    return p;
}

std::size_t expected_active_count(const BudgetLedger& led, Category c, std::size_t n,
                                  std::size_t pool_size) {
    const double target = led.eta[c] * led.theta_cat[c] * static_cast<double>(n - 1);
    std::size_t k = static_cast<std::size_t>(std::floor(target + 1e-9));
    if (k == 0 && led.eta[c] > 0.0 && led.theta_cat[c] > 0.0 && pool_size > 0) k = 1;
    return std::min(k, pool_size);
}

namespace {

// First k of a partial Fisher-Yates pass over a copy of the pool, returned
// sorted so downstream iteration order is stable.
std::vector<std::uint32_t> sample_without_replacement(const std::vector<std::uint32_t>& pool,
                                                      std::size_t k, std::mt19937_64& rng) {
    std::vector<std::uint32_t> tmp = pool;
    for (std::size_t t = 0; t < k; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, tmp.size() - 1);
        std::swap(tmp[t], tmp[pick(rng)]);
    }
    tmp.resize(k);
    std::sort(tmp.begin(), tmp.end());
    return tmp;
}

}  // namespace

ActiveNegatives draw_active(const NegativePools& pools, const BudgetLedger& led,
                            const HansConfig& cfg, std::uint64_t epoch) {
    const std::size_t n = pools.n;
    ActiveNegatives act(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = make_stream(cfg.seed, stream_tag::draw, epoch, i);
        for (std::size_t c = 0; c < num_categories; ++c) {
            const auto& pool = pools.pools[c][i];
            const std::size_t k =
                expected_active_count(led, static_cast<Category>(c), n, pool.size());
            if (k > 0) act.sets[c][i] = sample_without_replacement(pool, k, rng);
        }
    }
    return act;
}

ActiveNegatives swap_active(const NegativePools& pools, const ActiveNegatives& current,
                            const BudgetLedger& led, const HansConfig& cfg,
                            std::uint64_t epoch) {
    if (!led.saturated)
        throw config_error("swap requested before the budget saturated");

    const std::size_t n = pools.n;
    ActiveNegatives act(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = make_stream(cfg.seed, stream_tag::swap, epoch, i);
        for (std::size_t c = 0; c < num_categories; ++c) {
            const std::size_t k = current.sets[c][i].size();
            if (k > 0) act.sets[c][i] = sample_without_replacement(pools.pools[c][i], k, rng);
        }
    }
    return act;
}

std::string ledger_to_json(const BudgetLedger& led) {
    json j;
    j["eta_hard"] = led.eta[cat_hard];
    j["eta_inter"] = led.eta[cat_inter];
    j["eta_easy"] = led.eta[cat_easy];
    j["cursor"] = led.cursor;
    j["saturated"] = led.saturated;
    j["epoch"] = led.epoch;
    return j.dump();
}

BudgetLedger ledger_from_json(const std::string& text, const HansConfig& cfg) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("ledger parse error: ") + e.what());
    }
    BudgetLedger led = warmup_state(cfg);
    try {
        led.eta[cat_hard] = j.at("eta_hard").get<double>();
        led.eta[cat_inter] = j.at("eta_inter").get<double>();
        led.eta[cat_easy] = j.at("eta_easy").get<double>();
        led.cursor = j.at("cursor").get<int>();
        led.saturated = j.at("saturated").get<bool>();
        led.epoch = j.at("epoch").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw config_error(std::string("ledger field error: ") + e.what());
    }
    if (led.cursor < 0 || led.cursor >= static_cast<int>(num_categories))
        throw config_error("ledger cursor out of range");
    return led;
}

}  // namespace adngcl
