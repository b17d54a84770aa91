#include <optional>

#include "nfrbench/parser.hpp"
#include "nfrbench/text.hpp"

namespace nfrbench {

namespace {

enum class Bucket {
    ProblemAgnostic,
    IoConditions,
    ExpectedBehavior,
    EdgeCases,
    TimePerformance,
    Robustness,
    Maintainability,
    Reliability,
};

// Headings that only group buckets and carry no bullets of their own.
bool is_group_heading(const std::string& h) {
    return h == "functional requirements" || h == "non-functional requirements" ||
           h == "nonfunctional requirements" || h == "non functional requirements" ||
           h == "specific quality requirements" || h == "quality requirements";
}

std::optional<Bucket> classify(const std::string& h) {
    if (h.starts_with("problem agnostic") || h.starts_with("problem-agnostic")) {
        return Bucket::ProblemAgnostic;
    }
    if (h.starts_with("expected behavio")) return Bucket::ExpectedBehavior;
    auto cat = try_normalize_category(h);
    if (!cat) return std::nullopt;
    switch (*cat) {
        case Category::FrGeneral:
            // "General" alone is a test-doc heading; in requirement documents
            // the general bucket is the input/output one.
            return Bucket::IoConditions;
        case Category::FrEdge: return Bucket::EdgeCases;
        case Category::NfrTime: return Bucket::TimePerformance;
        case Category::NfrRobustness: return Bucket::Robustness;
        case Category::NfrMaintainability: return Bucket::Maintainability;
        case Category::NfrReliability: return Bucket::Reliability;
    }
    return std::nullopt;
}

std::vector<std::string>& bucket_ref(RequirementSet& rs, Bucket b) {
    switch (b) {
        case Bucket::ProblemAgnostic: return rs.problem_agnostic;
        case Bucket::IoConditions: return rs.io_conditions;
        case Bucket::ExpectedBehavior: return rs.expected_behavior;
        case Bucket::EdgeCases: return rs.edge_cases;
        case Bucket::TimePerformance: return rs.time_performance;
        case Bucket::Robustness: return rs.robustness;
        case Bucket::Maintainability: return rs.maintainability;
        case Bucket::Reliability: return rs.reliability;
    }
    return rs.problem_agnostic;
}

std::string strip_bullet(std::string_view line) {
    auto t = text::trim(line);
    if (t.size() >= 2 && (t[0] == '-' || t[0] == '*' || t[0] == '+') && t[1] == ' ') {
        t.remove_prefix(2);
        t = text::trim(t);
    } else if (t == "-" || t == "*" || t == "+") {
        return {};
    }
    return std::string(t);
}

void emit_section(std::string& out, std::string_view heading, const std::vector<std::string>& items) {
    if (items.empty()) return;
    out += heading;
    out += '\n';
    for (const auto& item : items) {
        out += "- ";
        out += item;
        out += '\n';
    }
    out += '\n';
}

}  // namespace

RequirementSet parse_requirements_doc(std::string_view doc, std::vector<std::string>* warnings) {
    RequirementSet rs;
    rs.raw = std::string(doc);

    std::optional<Bucket> current;
    int current_depth = 0;

    for (const auto& line : text::split_lines(doc)) {
        if (text::trim(line).empty() || text::trim(line).starts_with("```")) continue;

        if (int depth = text::heading_depth(line); depth > 0) {
            const std::string h = text::to_lower(text::collapse_spaces(text::strip_heading_marks(line)));
            if (is_group_heading(h)) {
                current.reset();
                current_depth = depth;
                continue;
            }
            if (auto b = classify(h)) {
                current = b;
                current_depth = depth;
                continue;
            }
            if (current && depth > current_depth) continue;  // sub-heading like "### Inputs"
            if (warnings) {
                warnings->push_back("unknown requirements heading '" +
                                    std::string(text::trim(line)) + "'; bullets go to problem_agnostic");
            }
            current = Bucket::ProblemAgnostic;
            current_depth = depth;
            continue;
        }

        std::string item = strip_bullet(line);
        if (item.empty()) continue;
        if (!current) {
            if (warnings) warnings->push_back("text outside any requirement section: '" + item + "'");
            bucket_ref(rs, Bucket::ProblemAgnostic).push_back(std::move(item));
            continue;
        }
        bucket_ref(rs, *current).push_back(std::move(item));
    }
    return rs;
}

std::string serialize_requirements(const RequirementSet& rs) {
    std::string out;
    emit_section(out, "# Problem Agnostic Requirements", rs.problem_agnostic);

    if (!rs.io_conditions.empty() || !rs.expected_behavior.empty() || !rs.edge_cases.empty()) {
        out += "# Functional Requirements\n";
        emit_section(out, "## Input-output Conditions", rs.io_conditions);
        emit_section(out, "## Expected Behavior", rs.expected_behavior);
        emit_section(out, "## Edge Cases", rs.edge_cases);
    }

    const bool quality = !rs.robustness.empty() || !rs.reliability.empty() || !rs.maintainability.empty();
    if (!rs.time_performance.empty() || quality) {
        out += "# Non-functional Requirements\n";
        emit_section(out, "## Performance", rs.time_performance);
        if (quality) {
            out += "## Specific Quality Requirements\n";
            emit_section(out, "### Robustness", rs.robustness);
            emit_section(out, "### Reliability", rs.reliability);
            emit_section(out, "### Maintainability", rs.maintainability);
        }
    }
    while (out.size() >= 2 && out.ends_with("\n\n")) out.pop_back();
    return out;
}

}  // namespace nfrbench
