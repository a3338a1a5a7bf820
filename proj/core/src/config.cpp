#include <levylat/config.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levylat {

Rat RunConfig::parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: " + text);
        return Rat(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        long places = static_cast<long>(text.size() - dot - 1);
        Int num(digits);
        return Rat(num, int_pow(Int(10), places));
    }
    return Rat(Int(text));
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");

    RunConfig cfg;
    auto rat = [&](const nlohmann::json& v) {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rat(v.get<long>());
        if (v.is_number_float()) return parse_rational(nlohmann::json(v).dump());
        throw std::runtime_error("expected rational-valued config entry");
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const auto& v = it.value();
        if (key == "family") cfg.family = v.get<std::string>();
        else if (key == "alpha") cfg.alpha = rat(v);
        else if (key == "beta") cfg.beta = rat(v);
        else if (key == "sigma") cfg.sigma = rat(v);
        else if (key == "scale") cfg.scale = rat(v);
        else if (key == "d") cfg.d = v.get<int>();
        else if (key == "n") cfg.n = v.get<int>();
        else if (key == "m") cfg.m = v.get<int>();
        else if (key == "k") cfg.k = v.get<int>();
        else if (key == "level_lo") cfg.level_lo = v.get<int>();
        else if (key == "level_hi") cfg.level_hi = v.get<int>();
        else if (key == "m_lo") cfg.m_lo = v.get<int>();
        else if (key == "m_hi") cfg.m_hi = v.get<int>();
        else if (key == "m_max") cfg.m_max = v.get<int>();
        else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
        else if (key == "samples") cfg.samples = v.get<std::size_t>();
        else if (key == "workers") cfg.workers = v.get<int>();
        else if (key == "tolerance") cfg.tolerance = v.get<double>();
        else if (key == "z_threshold") cfg.z_threshold = v.get<double>();
        else if (key == "grid_max") cfg.grid_max = v.get<double>();
        else if (key == "grid_points") cfg.grid_points = v.get<int>();
        else if (key == "out_dir") cfg.out_dir = v.get<std::string>();
        else throw std::runtime_error("unknown config key: " + key);
    }
    return cfg;
}

void RunConfig::validate_and_clamp() {
    family_from_name(family);  // throws on unknown
    if (alpha <= 0 || beta <= 0 || sigma <= 0 || scale <= 0)
        throw std::invalid_argument("family parameters must be positive");
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    d = std::min(d, Caps::max_d);
    if (n < 0 || m < 0) throw std::invalid_argument("levels must be nonnegative");
    n = std::min(n, Caps::max_level);
    m = std::max(1, std::min(m, Caps::max_m));
    k = std::max(1, std::min(k, Caps::max_k));
    m_max = std::max(3, std::min(m_max, Caps::max_m + 2));
    m_lo = std::max(1, std::min(m_lo, Caps::max_m));
    m_hi = std::max(m_lo + 1, std::min(m_hi, Caps::max_m));
    level_lo = std::max(0, level_lo);
    level_hi = std::max(level_lo, std::min(level_hi, Caps::max_level));
    if (samples < 100) throw std::invalid_argument("samples must be >= 100");
    if (workers < 1 || workers > 64) throw std::invalid_argument("workers must be in 1..64");
    if (tolerance <= 0 || z_threshold <= 0) throw std::invalid_argument("tolerances must be positive");
    if (grid_points < 2 || grid_max <= 0) throw std::invalid_argument("bad grid");
}

ReferenceFamily RunConfig::make_family() const {
    switch (family_from_name(family)) {
        case FamilyKind::Gamma: return ReferenceFamily::gamma(alpha, beta, d);
        case FamilyKind::Gaussian: return ReferenceFamily::gaussian(sigma, d);
        case FamilyKind::Cauchy: return ReferenceFamily::cauchy(scale, d);
    }
    throw std::logic_error("unreachable");
}

std::string RunConfig::canonical_echo() const {
    std::ostringstream os;
    os << "family=" << family << ";alpha=" << rat_string(alpha) << ";beta=" << rat_string(beta)
       << ";sigma=" << rat_string(sigma) << ";scale=" << rat_string(scale) << ";d=" << d
       << ";n=" << n << ";m=" << m << ";k=" << k << ";level_lo=" << level_lo
       << ";level_hi=" << level_hi << ";m_lo=" << m_lo << ";m_hi=" << m_hi << ";m_max=" << m_max
       << ";seed=" << seed << ";samples=" << samples << ";workers=" << workers
       << ";tolerance=" << tolerance << ";z=" << z_threshold << ";grid_max=" << grid_max
       << ";grid_points=" << grid_points;
    return os.str();
}

}  // namespace levylat
