// File formats: JSON documents for instances, policies and planning results
// (decimal text, 1-based indices on disk), CSV emission with deterministic
// number formatting, and a small SVG curve emitter for regret plots.

#pragma once

#include "robustrl/core.hpp"
#include "robustrl/planning.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace robustrl {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// instance files
// ---------------------------------------------------------------------------

inline json instance_to_json(const RmdpInstance& inst) {
    json doc;
    doc["H"] = inst.horizon;
    doc["S"] = inst.num_states;
    doc["A"] = inst.num_actions;
    doc["rho"] = inst.robust_radius;
    doc["initial_state"] = inst.initial_state + 1; // 1-based on disk
    doc["rewards"] = inst.rewards;
    doc["kernel"] = inst.kernel;
    return doc;
}

/// Parses an instance document; kernel rows within the stochasticity
/// tolerance are renormalized (decimal text round-trips can perturb sums in
/// the last digit). Throws std::invalid_argument on malformed input.
inline RmdpInstance instance_from_json(const json& doc) {
    RmdpInstance inst;
    try {
        inst.horizon = doc.at("H").get<int>();
        inst.num_states = doc.at("S").get<int>();
        inst.num_actions = doc.at("A").get<int>();
        inst.robust_radius = doc.at("rho").get<prec_t>();
        inst.initial_state = doc.at("initial_state").get<int>() - 1;
        inst.rewards = doc.at("rewards").get<StageRewards>();
        inst.kernel = doc.at("kernel").get<StageKernel>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed instance document: ") + e.what());
    }
    for (auto& stage : inst.kernel)
        for (auto& state_rows : stage)
            for (auto& row : state_rows) {
                const prec_t sum = std::accumulate(row.cbegin(), row.cend(), prec_t(0.0));
                if (std::abs(sum - 1.0) <= kProbTolerance && sum != 1.0)
                    for (auto& x : row)
                        x /= sum;
            }
    return inst;
}

inline void save_instance(const RmdpInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << instance_to_json(inst).dump(2) << '\n';
}

inline RmdpInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json doc = json::parse(in);
    return instance_from_json(doc);
}

// ---------------------------------------------------------------------------
// policy files
// ---------------------------------------------------------------------------

inline json policy_to_json(const PolicyTable& policy) {
    json doc;
    doc["deterministic"] = policy.deterministic;
    doc["pi"] = policy.pi;
    return doc;
}

inline PolicyTable policy_from_json(const json& doc) {
    PolicyTable policy;
    try {
        policy.deterministic = doc.at("deterministic").get<bool>();
        policy.pi = doc.at("pi").get<std::vector<std::vector<numvec>>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed policy document: ") + e.what());
    }
    return policy;
}

inline void save_policy(const PolicyTable& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << policy_to_json(policy).dump(2) << '\n';
}

inline PolicyTable load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json doc = json::parse(in);
    return policy_from_json(doc);
}

// ---------------------------------------------------------------------------
// planning result files
// ---------------------------------------------------------------------------

inline std::string operator_kind_name(RobustOperatorKind kind) {
    switch (kind) {
    case RobustOperatorKind::TvDualFull: return "tv_dual_full";
    case RobustOperatorKind::TvDualVanishing: return "tv_dual_vanishing";
    case RobustOperatorKind::BoundedRatio: return "bounded_ratio";
    }
    throw std::logic_error("unknown operator kind");
}

inline RobustOperatorKind operator_kind_from_name(const std::string& name) {
    if (name == "tv_dual_full") return RobustOperatorKind::TvDualFull;
    if (name == "tv_dual_vanishing") return RobustOperatorKind::TvDualVanishing;
    if (name == "bounded_ratio") return RobustOperatorKind::BoundedRatio;
    throw std::invalid_argument("unknown operator kind: " + name);
}

inline json planning_result_to_json(const PlanningResult& result, const GapDiagnostic& gaps) {
    json doc;
    doc["operator"] = {{"kind", operator_kind_name(result.op.kind)},
                       {"parameter", result.op.parameter}};
    doc["v_star"] = result.v_star.v;
    doc["q_star"] = result.q_star.q;
    doc["pi_star"] = policy_to_json(result.pi_star);
    json stages = json::array();
    for (const auto& row : gaps.stages) {
        stages.push_back({{"stage", row.stage},
                          {"v_gap", row.v_gap},
                          {"q_gap", row.q_gap},
                          {"coarse_bound", row.coarse_bound},
                          {"fine_bound", row.fine_bound},
                          {"within", row.within}});
    }
    doc["gaps"] = stages;
    doc["gaps_all_within"] = gaps.all_within;
    return doc;
}

// ---------------------------------------------------------------------------
// deterministic text formatting
// ---------------------------------------------------------------------------

/// Shortest text that parses back to the same double; used by every CSV
/// emitter so identical runs produce identical bytes.
inline std::string format_number(prec_t x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// 64-bit FNV-1a over a canonical string; experiment provenance.
inline std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

inline std::uint64_t instance_hash(const RmdpInstance& inst) {
    return fnv1a_hash(instance_to_json(inst).dump());
}

// ---------------------------------------------------------------------------
// SVG regret curves
// ---------------------------------------------------------------------------

/// Renders one or more named curves (shared x grid per curve) as an SVG line
/// chart. Axes are linear; intended for quick visual inspection of regret
/// growth, not publication graphics.
inline void write_svg_curves(const std::string& path,
                             const std::vector<std::pair<std::string, std::vector<std::pair<prec_t, prec_t>>>>& curves) {
    constexpr int width = 720, height = 480, margin = 50;
    prec_t xmax = 1.0, ymax = 1.0;
    for (const auto& [name, pts] : curves)
        for (const auto& [x, y] : pts) {
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int color_index = 0;
    int label_y = margin;
    for (const auto& [name, pts] : curves) {
        const char* color = colors[color_index++ % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) {
            const prec_t px = margin + (width - 2 * margin) * (x / xmax);
            const prec_t py = height - margin - (height - 2 * margin) * (y / ymax);
            out << format_number(px) << ',' << format_number(py) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - margin - 160 << "\" y=\"" << label_y
            << "\" fill=\"" << color << "\" font-size=\"12\">" << name << "</text>\n";
        label_y += 16;
    }
    out << "</svg>\n";
}

} // namespace robustrl
