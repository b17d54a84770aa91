#include "nfrbench/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nfrbench/text.hpp"

namespace nfrbench {

namespace {

constexpr std::string_view kReqInstruction = "Write requirements for the problem.";
constexpr std::string_view kCodeInstruction = "Write the code for the problem.";
constexpr std::string_view kTestInstruction = "Write test cases for the problem.";

const PromptTemplates kBuiltin = [] {
    const std::string req = "{description}\nWrite requirements for the problem.\n{requirements}";
    PromptTemplates t;
    t.requirements = {req, "{description}"};
    t.code = {req + "\nWrite the code for the problem.\n{code}", req};
    t.tests = {req + "\nWrite test cases for the problem.\n{tests}", req};
    t.code_tdd = {req + "\nWrite test cases for the problem.\n{tests}\nWrite the code for the problem.\n{code}",
                  req + "\nWrite test cases for the problem.\n{tests}"};
    return t;
}();

std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data files conventionally end with a newline that is not part of the block.
std::string chomp(std::string s) {
    if (s.ends_with("\r\n")) s.resize(s.size() - 2);
    else if (s.ends_with('\n')) s.pop_back();
    return s;
}

std::string_view target_phrase(Category c) {
    switch (c) {
        case Category::NfrTime: return "time performance";
        case Category::NfrRobustness: return "robustness";
        case Category::NfrMaintainability: return "maintainability";
        case Category::NfrReliability: return "reliability";
        default: return "functional";
    }
}

void require_example_fields(const PromptPlan& plan) {
    for (std::size_t i = 0; i < plan.examples.size(); ++i) {
        const auto& ex = plan.examples[i];
        const auto where = "in-context example " + std::to_string(i);
        const bool wants_code = plan.stage == Stage::Code || plan.stage == Stage::CodeTdd;
        const bool wants_tests = plan.stage == Stage::Tests || plan.stage == Stage::CodeTdd;
        if (wants_code && !ex.code) throw MissingContext(where + " lacks code");
        if (wants_tests && !ex.tests) throw MissingContext(where + " lacks tests");
    }
}

}  // namespace

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Requirements: return "requirements";
        case Stage::Code: return "code";
        case Stage::Tests: return "tests";
        case Stage::CodeTdd: return "code_tdd";
    }
    return "requirements";
}

Stage stage_from_string(std::string_view s) {
    if (s == "requirements") return Stage::Requirements;
    if (s == "code") return Stage::Code;
    if (s == "tests") return Stage::Tests;
    if (s == "code_tdd") return Stage::CodeTdd;
    throw std::invalid_argument("unknown stage: '" + std::string(s) + "'");
}

std::string_view default_stage_instruction(Stage s) {
    switch (s) {
        case Stage::Requirements: return kReqInstruction;
        case Stage::Code:
        case Stage::CodeTdd: return kCodeInstruction;
        case Stage::Tests: return kTestInstruction;
    }
    return kReqInstruction;
}

PromptPlan make_plan(Stage stage, std::vector<IclExample> examples, ExtraContext extra) {
    PromptPlan plan;
    plan.stage = stage;
    plan.examples = std::move(examples);
    plan.stage_instruction = std::string(default_stage_instruction(stage));
    plan.extra_context = std::move(extra);
    return plan;
}

const StageTemplate& PromptTemplates::for_stage(Stage s) const {
    switch (s) {
        case Stage::Requirements: return requirements;
        case Stage::Code: return code;
        case Stage::Tests: return tests;
        case Stage::CodeTdd: return code_tdd;
    }
    return requirements;
}

const PromptTemplates& PromptTemplates::builtin() { return kBuiltin; }

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    PromptTemplates t = kBuiltin;
    for (Stage s : {Stage::Requirements, Stage::Code, Stage::Tests, Stage::CodeTdd}) {
        StageTemplate& st = s == Stage::Requirements ? t.requirements
                            : s == Stage::Code       ? t.code
                            : s == Stage::Tests      ? t.tests
                                                     : t.code_tdd;
        const std::string base(to_string(s));
        if (auto ex = read_file(dir / (base + ".example.txt"))) st.example = chomp(*ex);
        if (auto pr = read_file(dir / (base + ".problem.txt"))) st.problem = chomp(*pr);
    }
    return t;
}

std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto name = tmpl.substr(i + 1, close - i - 1);
                auto it = std::find_if(values.begin(), values.end(),
                                       [&](const auto& kv) { return kv.first == name; });
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i]);
        ++i;
    }
    return out;
}

std::string build_prompt(const PromptPlan& plan, const Problem& problem, const PromptTemplates& templates) {
    const bool needs_reqs = plan.stage != Stage::Requirements;
    if (needs_reqs && !plan.extra_context.requirements) {
        throw MissingContext(std::string("stage '") + std::string(to_string(plan.stage)) +
                             "' needs generated requirements");
    }
    if (plan.stage == Stage::CodeTdd && !plan.extra_context.tests) {
        throw MissingContext("stage 'code_tdd' needs generated tests");
    }
    require_example_fields(plan);

    const StageTemplate& tmpl = templates.for_stage(plan.stage);
    std::vector<std::string> blocks;
    blocks.reserve(plan.examples.size() + 1);
    for (const auto& ex : plan.examples) {
        std::string code = ex.code.value_or("");
        if (ex.cot_plan && plan.stage != Stage::Requirements) code = *ex.cot_plan + "\n" + code;
        blocks.push_back(render_template(tmpl.example, {{"description", ex.description},
                                                        {"requirements", ex.requirements},
                                                        {"tests", ex.tests.value_or("")},
                                                        {"code", code}}));
    }
    blocks.push_back(render_template(tmpl.problem,
                                     {{"description", problem.description},
                                      {"requirements", plan.extra_context.requirements.value_or("")},
                                      {"tests", plan.extra_context.tests.value_or("")}}));

    std::string out = text::join(blocks, "\n\n");
    out += '\n';
    if (plan.nfr_instruction) {
        out += nfr_instruction_block();
        out += '\n';
    }
    out += plan.stage_instruction;
    if (plan.preference_instruction) {
        out += '\n';
        out += *plan.preference_instruction;
    }
    return out;
}

PreferenceMode preference_mode_from_string(std::string_view s) {
    if (s == "instruction") return PreferenceMode::Instruction;
    if (s == "plug_and_play") return PreferenceMode::PlugAndPlay;
    throw std::invalid_argument("unknown preference mode: '" + std::string(s) + "'");
}

std::string_view to_string(PreferenceMode m) {
    return m == PreferenceMode::Instruction ? "instruction" : "plug_and_play";
}

std::string preference_sentence(const std::set<Category>& targets) {
    std::vector<std::string> names;
    for (Category c : kNfrCategories) {
        if (targets.count(c)) names.emplace_back(target_phrase(c));
    }
    std::string list;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) list += (i + 1 == names.size()) ? " and " : ", ";
        list += names[i];
    }
    return "Consider the " + list + (names.size() == 1 ? " requirement" : " requirements") +
           " to be the most important.";
}

std::string filter_nfr_sections(std::string_view doc, const std::set<Category>& keep) {
    const auto lines = text::split_lines(doc);
    const std::size_t n = lines.size();
    std::vector<int> depth(n, 0);
    for (std::size_t i = 0; i < n; ++i) depth[i] = text::heading_depth(lines[i]);

    // End (exclusive) of the section opened by heading i.
    auto section_end = [&](std::size_t i) {
        std::size_t j = i + 1;
        while (j < n && !(depth[j] > 0 && depth[j] <= depth[i])) ++j;
        return j;
    };

    std::vector<bool> dropped(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (depth[i] == 0 || dropped[i]) continue;
        auto cat = try_normalize_category(lines[i]);
        if (cat && is_nonfunctional(*cat) && !keep.count(*cat)) {
            for (std::size_t j = i, e = section_end(i); j < e; ++j) dropped[j] = true;
        }
    }

    // Grouping headings emptied by the removal go too, innermost first.
    for (std::size_t step = 0; step < n; ++step) {
        bool changed = false;
        for (std::size_t i = n; i-- > 0;) {
            if (depth[i] == 0 || dropped[i] || try_normalize_category(lines[i])) continue;
            const std::size_t e = section_end(i);
            bool lost_child = false;
            bool has_content = false;
            for (std::size_t j = i + 1; j < e; ++j) {
                if (dropped[j]) {
                    lost_child = true;
                } else if (!text::trim(lines[j]).empty() && depth[j] == 0) {
                    has_content = true;
                }
            }
            if (lost_child && !has_content) {
                for (std::size_t j = i; j < e; ++j) {
                    if (!dropped[j]) {
                        dropped[j] = true;
                        changed = true;
                    }
                }
            }
        }
        if (!changed) break;
    }

    std::vector<std::string> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (!dropped[i]) kept.push_back(lines[i]);
    }
    std::string out = text::join(kept, "\n");
    if (doc.ends_with('\n') && !kept.empty()) out += '\n';
    return out;
}

PromptPlan apply_preference(PromptPlan plan, PreferenceMode mode, const std::set<Category>& targets) {
    for (Category c : targets) {
        if (!is_nonfunctional(c)) {
            throw std::invalid_argument("preference target must be an NFR category, got " +
                                        std::string(to_string(c)));
        }
    }
    if (mode == PreferenceMode::Instruction) {
        if (!targets.empty()) plan.preference_instruction = preference_sentence(targets);
        return plan;
    }
    if (targets.empty()) throw EmptyTargets();

    for (auto& ex : plan.examples) {
        ex.requirements = filter_nfr_sections(ex.requirements, targets);
        if (ex.tests) ex.tests = filter_nfr_sections(*ex.tests, targets);
    }
    if (plan.extra_context.requirements) {
        plan.extra_context.requirements = filter_nfr_sections(*plan.extra_context.requirements, targets);
    }
    if (plan.extra_context.tests) {
        plan.extra_context.tests = filter_nfr_sections(*plan.extra_context.tests, targets);
    }
    plan.nfr_subset = targets;
    return plan;
}

const std::string& nfr_instruction_block() {
    static const std::string block =
        "# Code must satisfy not only functional requirements but also the following "
        "non-functional requirements.\n"
        "# Non-functional Requirements\n"
        "## Performance: Pertains to time-centric aspects such as algorithmic time complexity "
        "or stipulated timeout conditions.\n"
        "## Robustness: Ensures that code is resilient to invalid inputs.\n"
        "## Maintainability: Considers factors that contribute to the ease of maintenance.\n"
        "## Reliability: Ensures that code can handle errors gracefully without causing system "
        "failures over an extended period.";
    return block;
}

std::vector<IclExample> load_icl_examples(const std::filesystem::path& dir, std::optional<std::size_t> limit) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("in-context example directory not found: " + dir.string());
    }
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) subdirs.push_back(entry.path());
    }
    std::sort(subdirs.begin(), subdirs.end());

    std::vector<IclExample> out;
    for (const auto& d : subdirs) {
        if (limit && out.size() >= *limit) break;
        IclExample ex;
        auto desc = read_file(d / "description.txt");
        auto reqs = read_file(d / "requirements.txt");
        if (!desc || !reqs) {
            throw std::runtime_error("example " + d.string() + " needs description.txt and requirements.txt");
        }
        ex.description = chomp(*desc);
        ex.requirements = chomp(*reqs);
        if (auto c = read_file(d / "code.txt")) ex.code = chomp(*c);
        if (auto t = read_file(d / "tests.txt")) ex.tests = chomp(*t);
        if (auto p = read_file(d / "plan.txt")) ex.cot_plan = chomp(*p);
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace nfrbench
