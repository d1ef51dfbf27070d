#include "rmo/config.hpp"

#include "rmo/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace rmo {

namespace {

void require(bool ok, const char* message)
{
    if (!ok) {
        throw InvariantError(message);
    }
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view text)
{
    const std::string s(trim(text));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("bad value for " + std::string(key) + ": '" + s + "'");
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text)
{
    const auto s = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad integer for " + std::string(key) + ": '" +
                                    std::string(s) + "'");
    }
    return v;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    std::string name;
    std::function<void(PipelineConfig&, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define RMO_DOUBLE_FIELD(key, member)                                                    \
    Field{key, [](PipelineConfig& c, std::string_view v) { c.member = parse_double(key, v); }, \
          [](const PipelineConfig& c) { return fmt(c.member); }}
#define RMO_INT_FIELD(key, member)                                                       \
    Field{key, [](PipelineConfig& c, std::string_view v) { c.member = parse_int(key, v); }, \
          [](const PipelineConfig& c) { return std::to_string(c.member); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        RMO_INT_FIELD("h1", feature.h1),
        RMO_INT_FIELD("h2", feature.h2),
        RMO_DOUBLE_FIELD("epsilon", feature.epsilon),
        RMO_DOUBLE_FIELD("f_min", feature.f_min),
        RMO_DOUBLE_FIELD("f_max", feature.f_max),
        RMO_DOUBLE_FIELD("t_seg", t_seg),
        RMO_DOUBLE_FIELD("alpha", cluster.alpha),
        RMO_DOUBLE_FIELD("w_offset", cluster.w_offset),
        RMO_DOUBLE_FIELD("w_depth", cluster.w_depth),
        RMO_DOUBLE_FIELD("d_eps", cluster.d_eps),
        RMO_INT_FIELD("n_min_pts", cluster.n_min_pts),
        RMO_INT_FIELD("slope_win", cluster.slope_win),
        RMO_INT_FIELD("slope_stride", cluster.slope_stride),
        RMO_DOUBLE_FIELD("h_prior", refine.h_prior),
        RMO_DOUBLE_FIELD("h_data", refine.h_data),
        RMO_DOUBLE_FIELD("h_para", refine.h_para),
        RMO_DOUBLE_FIELD("lambda", refine.lambda),
        RMO_INT_FIELD("n_min", refine.n_min),
        RMO_DOUBLE_FIELD("cell_offset", refine.cell_offset),
        RMO_DOUBLE_FIELD("cell_depth", refine.cell_depth),
        RMO_INT_FIELD("h_s", metric.h_s),
        RMO_DOUBLE_FIELD("d_t", metric.d_t),
    };
    return table;
}

#undef RMO_DOUBLE_FIELD
#undef RMO_INT_FIELD

const Field& find_field(std::string_view key)
{
    for (const auto& f : fields()) {
        if (f.name == key) {
            return f;
        }
    }
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void FeatureConfig::validate() const
{
    require(h1 >= 1 && h2 >= 1, "AGC windows must be >= 1");
    require(epsilon > 0.0, "epsilon must be > 0");
    require(f_min >= 0.0 && f_min < f_max && f_max <= 0.5, "pass band must satisfy 0 <= f_min < f_max <= 0.5");
}

void ClusterConfig::validate() const
{
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require(w_offset >= 0.0 && w_depth >= 0.0, "endpoint weights must be >= 0");
    require(d_eps > 0.0, "d_eps must be > 0");
    require(n_min_pts >= 1, "n_min_pts must be >= 1");
    require(slope_win >= 2, "slope_win must be >= 2");
    require(slope_stride >= 1, "slope_stride must be >= 1");
}

void RefineConfig::validate() const
{
    require(h_prior > 0.0 && h_data > 0.0 && h_para > 0.0, "bandwidths must be > 0");
    require(lambda >= 0.0, "lambda must be >= 0");
    require(n_min >= 1, "n_min must be >= 1");
    require(cell_offset > 0.0 && cell_depth > 0.0, "slope-field cells must be > 0");
}

void MetricConfig::validate() const
{
    require(h_s >= 0, "h_s must be >= 0");
    require(d_t > 0.0, "d_t must be > 0");
}

void PipelineConfig::validate() const
{
    feature.validate();
    require(t_seg > 0.0 && t_seg < 1.0, "t_seg must lie in (0, 1)");
    cluster.validate();
    refine.validate();
    metric.validate();
}

void PipelineConfig::set(std::string_view key, std::string_view value)
{
    find_field(key).set(*this, value);
}

std::string PipelineConfig::get(std::string_view key) const
{
    return find_field(key).get(*this);
}

const std::vector<std::string>& PipelineConfig::keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& f : fields()) {
            out.push_back(f.name);
        }
        return out;
    }();
    return names;
}

PipelineConfig preset(std::string_view name)
{
    PipelineConfig c;
    if (name == "bp") {
        c.feature.h1 = 9;
        c.feature.h2 = 15;
        c.cluster.n_min_pts = 1;
        c.cluster.d_eps = 8.0;
        c.refine.n_min = 20;
    } else if (name == "fa") {
        c.feature.h1 = 15;
        c.feature.h2 = 31;
        c.cluster.n_min_pts = 1;
        c.cluster.d_eps = 8.0;
        c.refine.n_min = 20;
    } else if (name == "fb") {
        c.feature.h1 = 15;
        c.feature.h2 = 31;
        c.cluster.n_min_pts = 1;
        c.cluster.d_eps = 4.0;
        c.refine.n_min = 10;
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "' (bp, fa, fb)");
    }
    c.refine.h_prior = 5.0;
    c.refine.h_data = 5.0;
    c.refine.h_para = 50.0;
    return c;
}

void apply_config_text(PipelineConfig& config, std::string_view text)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        " is not key=value");
        }
        config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::string to_config_text(const PipelineConfig& config)
{
    std::string out;
    for (const auto& f : fields()) {
        out += f.name + "=" + f.get(config) + "\n";
    }
    return out;
}

}  // namespace rmo
