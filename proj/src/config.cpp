#include "adngcl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adngcl/errors.hpp"

using json = nlohmann::json;

namespace adngcl {

void RunConfig::validate() const {
    auto prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v < 1.0))
            throw config_error(std::string(name) + " must lie in [0,1)");
    };
    prob(p_e, "p_e");
    prob(p_f1, "p_f1");
    prob(p_f2, "p_f2");

    if (h == 0 || h_p == 0) throw config_error("hidden and projection widths must be positive");
    if (lr <= 0.0) throw config_error("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw config_error("adam betas must lie in [0,1)");
    if (eps <= 0.0) throw config_error("adam eps must be positive");
    if (tau <= 0.0) throw config_error("temperature tau must be positive");

    hans.validate();

    if (epochs < hans.t_init + 2ull * hans.window)
        throw config_error("epochs must cover warm-up plus two loss windows");
    if (seeds.empty()) throw config_error("at least one seed is required");

    if (probe_lambda < 0.0) throw config_error("probe_lambda must be nonnegative");
    if (probe_lr <= 0.0) throw config_error("probe_lr must be positive");
    if (probe_iters == 0) throw config_error("probe_iters must be positive");

    if (dataset_dir.empty()) {
        if (sbm_num_classes == 0 || sbm_n == 0 || sbm_n % sbm_num_classes != 0)
            throw config_error("sbm_n must be a positive multiple of sbm_num_classes");
        if (sbm_d == 0) throw config_error("sbm_d must be positive");
        if (!(sbm_p_in >= 0.0 && sbm_p_in <= 1.0 && sbm_p_out >= 0.0 &&
              sbm_p_out <= sbm_p_in))
            throw config_error("need 0 <= sbm_p_out <= sbm_p_in <= 1");
    }

    for (const auto& r : sweep_ratios) {
        if (r[0] < 0 || r[1] < 0 || r[2] < 0 || std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9)
            throw config_error("each sweep ratio triple must be nonnegative and sum to 1");
    }
    for (double th : sweep_thetas)
        if (!(th >= 0.0 && th <= 1.0))
            throw config_error("sweep theta values must lie in [0,1]");
}

namespace {

double as_double(const json& v, const std::string& key) {
    if (!v.is_number()) throw config_error("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw config_error("config key '" + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw config_error("config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw config_error("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config must be a JSON object");

    RunConfig c;
    double r_easy = 0.1, r_hard = 0.3, r_inter = 0.6;

    for (const auto& [key, val] : j.items()) {
        if (key == "dataset_dir") c.dataset_dir = as_string(val, key);
        else if (key == "sbm_n") c.sbm_n = as_uint(val, key);
        else if (key == "sbm_num_classes") c.sbm_num_classes = as_uint(val, key);
        else if (key == "sbm_p_in") c.sbm_p_in = as_double(val, key);
        else if (key == "sbm_p_out") c.sbm_p_out = as_double(val, key);
        else if (key == "sbm_d") c.sbm_d = as_uint(val, key);
        else if (key == "sbm_feature_shift") c.sbm_feature_shift = as_double(val, key);
        else if (key == "sbm_seed") c.sbm_seed = as_uint(val, key);
        else if (key == "split_seed") c.split_seed = as_uint(val, key);
        else if (key == "p_e") c.p_e = as_double(val, key);
        else if (key == "p_f1") c.p_f1 = as_double(val, key);
        else if (key == "p_f2") c.p_f2 = as_double(val, key);
        else if (key == "h") c.h = as_uint(val, key);
        else if (key == "h_p") c.h_p = as_uint(val, key);
        else if (key == "lr") c.lr = as_double(val, key);
        else if (key == "beta1") c.beta1 = as_double(val, key);
        else if (key == "beta2") c.beta2 = as_double(val, key);
        else if (key == "eps") c.eps = as_double(val, key);
        else if (key == "tau") c.tau = as_double(val, key);
        else if (key == "theta_max") c.hans.theta_max = as_double(val, key);
        else if (key == "r_easy") r_easy = as_double(val, key);
        else if (key == "r_hard") r_hard = as_double(val, key);
        else if (key == "r_inter") r_inter = as_double(val, key);
        else if (key == "t_init") c.hans.t_init = static_cast<std::uint32_t>(as_uint(val, key));
        else if (key == "t_interval")
            c.hans.t_interval = static_cast<std::uint32_t>(as_uint(val, key));
        else if (key == "e") c.hans.window = static_cast<std::uint32_t>(as_uint(val, key));
        else if (key == "gamma") c.hans.gamma = as_double(val, key);
        else if (key == "b") c.hans.step_scale = as_double(val, key);
        else if (key == "c_cat") c.hans.step_cap = as_double(val, key);
        else if (key == "eta_floor") c.hans.eta_floor = as_double(val, key);
        else if (key == "swap_interval")
            c.hans.swap_interval = static_cast<std::uint32_t>(as_uint(val, key));
        else if (key == "epochs") c.epochs = as_uint(val, key);
        else if (key == "seeds") {
            if (!val.is_array() || val.empty())
                throw config_error("config key 'seeds' must be a nonempty array");
            c.seeds.clear();
            for (const auto& s : val) c.seeds.push_back(as_uint(s, key));
        } else if (key == "probe_lambda") c.probe_lambda = as_double(val, key);
        else if (key == "probe_lr") c.probe_lr = as_double(val, key);
        else if (key == "probe_iters") c.probe_iters = as_uint(val, key);
        else if (key == "probe_projector_output") c.probe_projector_output = as_bool(val, key);
        else if (key == "intra_view_negatives") c.intra_view_negatives = as_bool(val, key);
        else if (key == "literal_eq8") c.literal_eq8 = as_bool(val, key);
        else if (key == "deterministic") c.deterministic = as_bool(val, key);
        else if (key == "out_dir") c.out_dir = as_string(val, key);
        else if (key == "sweep_ratios") {
            if (!val.is_array()) throw config_error("sweep_ratios must be an array of triples");
            c.sweep_ratios.clear();
            for (const auto& row : val) {
                if (!row.is_array() || row.size() != 3)
                    throw config_error("each sweep_ratios entry must be [easy, hard, inter]");
                c.sweep_ratios.push_back(
                    {as_double(row[0], key), as_double(row[1], key), as_double(row[2], key)});
            }
        } else if (key == "sweep_thetas") {
            if (!val.is_array()) throw config_error("sweep_thetas must be an array of numbers");
            c.sweep_thetas.clear();
            for (const auto& th : val) c.sweep_thetas.push_back(as_double(th, key));
        } else {
            throw config_error("unknown config key '" + key + "'");
        }
    }

    c.hans.ratios = make_ratios(r_easy, r_hard, r_inter);
    c.validate();
    return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace adngcl
