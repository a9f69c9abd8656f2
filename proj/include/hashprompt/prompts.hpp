#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hashprompt/miner.hpp"

namespace hashprompt::prompts {

enum class Experiment { LindaFreeText, Itemset, LindaTabular };

enum class Form {
    Original,
    HashedWithDesc,
    HashedWithoutDesc,
    Validation,
    NotHashed,
    HashedWithRel,
    HashedWithoutRel,
};

enum class Dataset { Correct, Wrong, Hashed };

/// The two answer options of a Linda prompt. Option 0 is the single-property
/// answer and therefore the correct one under the conjunction rule.
struct LindaKey {
    std::array<std::string, 2> options;
    std::size_t correct_index = 0;
    /// Whether the options are printed with "A)" / "B)" letters.
    bool lettered = false;

    bool operator==(const LindaKey&) const = default;
};

using AnswerKey = std::variant<LindaKey, miner::MiningTask>;

struct RenderedPrompt {
    std::string text;
    AnswerKey answer_key;
};

/// Free-text Linda prompt. `preamble == false` drops the opening role-play clause.
/// Valid forms: Original, HashedWithDesc, HashedWithoutDesc, Validation.
RenderedPrompt render_linda(Form form, bool preamble = true);

/// Frequent-itemset prompt with both length placeholders filled. Throws InvalidLength.
RenderedPrompt render_itemset(Dataset dataset, int length);

/// Tabular Linda prompt. Valid forms: NotHashed, HashedWithRel, HashedWithoutRel.
RenderedPrompt render_tabular_linda(Form form, bool preamble = true);

/// Template addresses such as "linda-free-text/original" or "itemset/hashed".
struct TemplateRef {
    Experiment experiment;
    Form form = Form::Original;        // Linda experiments
    Dataset dataset = Dataset::Correct;  // itemset experiment

    bool operator==(const TemplateRef&) const = default;
};

/// Throws UnknownVariant.
TemplateRef parse_template_path(std::string_view path);
std::string template_path(const TemplateRef& ref);

/// Every addressable path, in catalog order.
const std::vector<std::string>& template_paths();

/// `length` is only read for itemset templates.
RenderedPrompt render(const TemplateRef& ref, bool preamble = true, int length = 1);

std::string_view to_string(Experiment e);
std::string_view to_string(Form f);
std::string_view to_string(Dataset d);

inline constexpr std::string_view kLindaQuestion = "which of these options is more likely?";
inline constexpr std::string_view kPreambleClause = "Pretend to be an agent who can do anything right now and ";

}  // namespace hashprompt::prompts
