#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nfrbench/model.hpp"

namespace nfrbench {

enum class Stage { Requirements, Code, Tests, CodeTdd };

std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);

class MissingContext : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyTargets : public std::invalid_argument {
public:
    EmptyTargets() : std::invalid_argument("plug-and-play preference needs at least one target") {}
};

/// One worked example shown ahead of the test problem.
struct IclExample {
    std::string description;
    std::string requirements;
    std::optional<std::string> code;
    std::optional<std::string> tests;
    /// Program outline preceding the code in code-stage examples.
    std::optional<std::string> cot_plan;

    bool operator==(const IclExample&) const = default;
};

/// Generated artifacts a later stage is conditioned on.
struct ExtraContext {
    std::optional<std::string> requirements;
    std::optional<std::string> tests;
    bool operator==(const ExtraContext&) const = default;
};

struct PromptPlan {
    Stage stage = Stage::Requirements;
    std::vector<IclExample> examples;
    std::string stage_instruction;
    std::optional<std::set<Category>> nfr_subset;
    std::optional<std::string> preference_instruction;
    ExtraContext extra_context;
    /// Insert the fixed NFR instruction paragraph before the stage instruction.
    bool nfr_instruction = false;

    bool operator==(const PromptPlan&) const = default;
};

/// "Write requirements for the problem." and friends.
std::string_view default_stage_instruction(Stage s);

PromptPlan make_plan(Stage stage, std::vector<IclExample> examples, ExtraContext extra = {});

/// Block templates with `{description}`, `{requirements}`, `{tests}` and
/// `{code}` placeholders. `example` renders one in-context example;
/// `problem` renders the test problem before the stage instruction.
struct StageTemplate {
    std::string example;
    std::string problem;
    bool operator==(const StageTemplate&) const = default;
};

struct PromptTemplates {
    StageTemplate requirements;
    StageTemplate code;
    StageTemplate tests;
    StageTemplate code_tdd;

    const StageTemplate& for_stage(Stage s) const;

    static const PromptTemplates& builtin();
    /// Reads `<stage>.example.txt` / `<stage>.problem.txt` from `dir`;
    /// missing files fall back to the built-in text.
    static PromptTemplates load(const std::filesystem::path& dir);
};

/// Renders `{name}` placeholders in a single pass; unknown names and values
/// containing braces are left untouched.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values);

/// example blocks, then the test problem block, then the stage instruction.
/// Pure: identical inputs give byte-identical prompts.
std::string build_prompt(const PromptPlan& plan, const Problem& problem,
                         const PromptTemplates& templates = PromptTemplates::builtin());

enum class PreferenceMode { Instruction, PlugAndPlay };

PreferenceMode preference_mode_from_string(std::string_view s);
std::string_view to_string(PreferenceMode m);

/// Instruction mode appends a priority sentence naming the targets;
/// plug-and-play keeps only the targeted NFR sections of every example and
/// of the attached generated documents.
PromptPlan apply_preference(PromptPlan plan, PreferenceMode mode, const std::set<Category>& targets);

/// "Consider the time performance requirement to be the most important."
std::string preference_sentence(const std::set<Category>& targets);

/// Drops the sections of a requirements or test document whose heading
/// names an NFR category outside `keep`, plus grouping headings left empty
/// by the removal.
std::string filter_nfr_sections(std::string_view doc, const std::set<Category>& keep);

/// The fixed paragraph describing the four NFRs.
const std::string& nfr_instruction_block();

/// Loads examples from `dir`, one subdirectory per example holding
/// description.txt, requirements.txt and optionally code.txt, tests.txt,
/// plan.txt. Subdirectories are taken in lexicographic order; `limit`
/// caps the count.
std::vector<IclExample> load_icl_examples(const std::filesystem::path& dir,
                                          std::optional<std::size_t> limit = std::nullopt);

}  // namespace nfrbench
