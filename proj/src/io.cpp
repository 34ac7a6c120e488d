#include "djl/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace djl::io {

using json = nlohmann::json;
using namespace djl::models;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

// Fixed formatting so identical runs produce byte-identical files.
std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

ModelSpec parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.contains("model") || !j.contains("params"))
        throw IoError("model file needs \"model\" and \"params\" fields");
    std::string name = j["model"];
    const json& p = j["params"];

    auto get = [&](const char* field) -> double {
        if (!p.contains(field))
            throw IoError("model " + name + " missing param \"" + field + "\"");
        return p[field].get<double>();
    };
    auto opt = [&](const char* field) {
        return p.contains(field) ? std::optional<double>(p[field].get<double>())
                                 : std::nullopt;
    };

    ParamSet params;
    std::optional<double> drift;
    if (name == "merton") {
        params = MertonParams{get("sigma"), get("lambda"), get("mu"), get("delta"), 0.0};
        drift = opt("b");
    } else if (name == "kou") {
        params = KouParams{get("sigma"), get("lambda"), get("p"), get("lambda_plus"),
                           get("lambda_minus"), 0.0};
        drift = opt("b");
    } else if (name == "nig") {
        params = NigParams{get("alpha"), get("beta"), get("delta"), 0.0};
        drift = opt("b");
    } else if (name == "vg") {
        params = VgParams{get("theta"), get("nu"), get("sigma"), 0.0};
        drift = opt("mu");
    } else if (name == "ruin") {
        params = JumpToRuinParams{get("sigma"), get("lambda")};
    } else if (name == "bs") {
        params = BlackScholesParams{get("sigma")};
    } else {
        throw IoError("unknown model \"" + name + "\"");
    }
    validate(params);

    ModelSpec m;
    if (drift) {
        std::visit(
            [&](auto& pp) {
                using P = std::decay_t<decltype(pp)>;
                if constexpr (std::is_same_v<P, MertonParams> ||
                              std::is_same_v<P, KouParams> ||
                              std::is_same_v<P, NigParams>)
                    pp.b = *drift;
                else if constexpr (std::is_same_v<P, VgParams>)
                    pp.mu = *drift;
            },
            params);
        m.params = params;
    } else {
        m.params = with_martingale_drift(params);
    }
    m.spot = j.value("spot", 1.0);
    m.id = name;
    return m;
}

ModelSpec read_model_file(const std::string& path) {
    return parse_model_json(slurp(path));
}

std::string model_to_json(const ModelSpec& model) {
    json p;
    std::visit(
        [&](const auto& pp) {
            using P = std::decay_t<decltype(pp)>;
            if constexpr (std::is_same_v<P, MertonParams>) {
                p = {{"sigma", pp.sigma}, {"lambda", pp.lambda}, {"mu", pp.mu},
                     {"delta", pp.delta}, {"b", pp.b}};
            } else if constexpr (std::is_same_v<P, KouParams>) {
                p = {{"sigma", pp.sigma},       {"lambda", pp.lambda},
                     {"p", pp.p},               {"lambda_plus", pp.lambda_plus},
                     {"lambda_minus", pp.lambda_minus}, {"b", pp.b}};
            } else if constexpr (std::is_same_v<P, NigParams>) {
                p = {{"alpha", pp.alpha}, {"beta", pp.beta}, {"delta", pp.delta},
                     {"b", pp.b}};
            } else if constexpr (std::is_same_v<P, VgParams>) {
                p = {{"theta", pp.theta}, {"nu", pp.nu}, {"sigma", pp.sigma},
                     {"mu", pp.mu}};
            } else if constexpr (std::is_same_v<P, JumpToRuinParams>) {
                p = {{"sigma", pp.sigma}, {"lambda", pp.lambda}};
            } else {
                p = {{"sigma", pp.sigma}};
            }
        },
        model.params);
    json j = {{"model", model_name(model.params)}, {"params", p}, {"spot", model.spot}};
    return j.dump(2) + "\n";
}

void write_surface_csv(const pricing::SurfaceGrid& s, const std::string& path) {
    auto out = open_out(path);
    out << "K,T,C\n";
    for (std::size_t j = 0; j < s.maturities.size(); ++j)
        for (std::size_t i = 0; i < s.strikes.size(); ++i)
            out << fmt(s.strikes[i]) << ',' << fmt(s.maturities[j]) << ','
                << fmt(s.price(i, j)) << "\n";
}

void write_surface_json(const pricing::SurfaceGrid& s, const std::string& path) {
    json j = {{"strikes", s.strikes},
              {"maturities", s.maturities},
              {"prices", s.prices},
              {"spot", s.spot}};
    open_out(path) << j.dump(2) << "\n";
}

pricing::SurfaceGrid read_surface_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("K,T,C", 0) != 0)
        throw IoError("surface CSV must start with header K,T,C");
    pricing::SurfaceGrid s;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::array<double, 3> row;
        char comma;
        if (!(ls >> row[0] >> comma >> row[1] >> comma >> row[2]))
            throw IoError("bad surface row: " + line);
        rows.push_back(row);
    }
    for (const auto& r : rows) {
        if (s.strikes.empty() || r[0] > s.strikes.back())
            s.strikes.push_back(r[0]);
        else
            break;
    }
    std::size_t nk = s.strikes.size();
    if (nk == 0 || rows.size() % nk != 0)
        throw IoError("surface CSV is not a rectangular grid");
    for (std::size_t j = 0; j < rows.size() / nk; ++j)
        s.maturities.push_back(rows[j * nk][1]);
    s.prices.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) s.prices[r] = rows[r][2];
    return s;
}

void write_local_vol_csv(const dupire::LocalVolSurface& s, const std::string& path) {
    auto out = open_out(path);
    out << "K,T,sigma_loc_sq,provenance\n";
    std::string prov = dupire::provenance_name(s.provenance);
    for (std::size_t j = 0; j < s.maturities.size(); ++j)
        for (std::size_t i = 0; i < s.strikes.size(); ++i)
            out << fmt(s.strikes[i]) << ',' << fmt(s.maturities[j]) << ','
                << fmt(s.value(i, j)) << ',' << prov << "\n";
}

void write_blowup_csv(const saddle::BlowupFit& fit, const std::string& path) {
    auto out = open_out(path);
    out << "T,sigma_loc_sq,fit_exponent,R2\n";
    for (std::size_t i = 0; i < fit.maturities.size(); ++i)
        out << fmt(fit.maturities[i]) << ',' << fmt(fit.local_variance[i]) << ','
            << fmt(fit.exp_mode ? fit.exp_slope : fit.exponent) << ','
            << fmt(fit.exp_mode ? fit.exp_r2 : fit.r2) << "\n";
}

void write_report_csv(const mc::TheoremReport& r, const std::string& path) {
    auto out = open_out(path);
    out << "K,eps,mc_price,stderr,analytic,z\n";
    for (const auto& c : r.cells)
        out << fmt(c.strike) << ',' << fmt(c.eps) << ',' << fmt(c.mc_price) << ','
            << fmt(c.std_error) << ',' << fmt(c.analytic) << ',' << fmt(c.z)
            << "\n";
}

std::string report_to_json(const mc::TheoremReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"strike", c.strike},
                         {"eps", c.eps},
                         {"mc_price", c.mc_price},
                         {"stderr", c.std_error},
                         {"analytic", c.analytic},
                         {"z", c.z},
                         {"cap_hits", c.cap_hits}});
    json j = {{"model", r.model_id},
              {"strikes", r.strikes},
              {"maturity", r.maturity},
              {"eps_list", r.eps_list},
              {"cells", cells},
              {"limit_prices", r.limit_prices},
              {"convergence", r.convergence},
              {"seed", r.seed},
              {"n_paths", r.n_paths},
              {"steps_per_year", r.steps_per_year}};
    return j.dump(2) + "\n";
}

void write_report_json(const mc::TheoremReport& r, const std::string& path) {
    open_out(path) << report_to_json(r);
}

std::string saddle_to_json(const saddle::SaddleResult& r) {
    json j = {{"s_hat", r.s_hat},
              {"k", r.k},
              {"T", r.T},
              {"m", r.m},
              {"dm_ds", r.dm_ds},
              {"d2m_ds2", r.d2m_ds2},
              {"dm_dT", r.dm_dT},
              {"local_variance_approx", r.local_variance_approx}};
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    open_out(path) << content;
}

}  // namespace djl::io
