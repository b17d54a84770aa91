#include <fstream>
#include <set>
#include <sstream>

#include "nfrbench/harness.hpp"
#include "nfrbench/json_io.hpp"
#include "nfrbench/text.hpp"

namespace nfrbench {

Dataset parse_dataset(std::string_view jsonl) {
    Dataset ds;
    std::set<std::string> seen;
    long line_no = 0;
    for (const auto& line : text::split_lines(jsonl)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
        Problem p;
        try {
            p = j.get<Problem>();
        } catch (const SchemaError& e) {
            throw SchemaError(e.what(), line_no);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(e.what(), line_no);
        }
        if (auto problems = validate_problem(p); !problems.empty()) {
            throw SchemaError(p.task_id + ": " + text::join(problems, "; "), line_no);
        }
        if (!seen.insert(p.task_id).second) throw SchemaError("duplicate task_id " + p.task_id, line_no);
        ds.problems.push_back(std::move(p));
    }
    if (ds.problems.empty()) ds.warnings.push_back("dataset is empty");
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str());
}

}  // namespace nfrbench
