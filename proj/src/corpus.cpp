#include "hashprompt/corpus.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include "hashprompt/error.hpp"
#include "text_util.hpp"

namespace hashprompt::corpus {

namespace {

constexpr std::string_view kCsvCorrect =
    "name,legs count,diet,blood,body hair,eggs,breastfeeding\n"
    "rabbit,4,herbivore,hot,yes,false,indeed\n"
    "human,2,omnivore,hot,yes,false,indeed\n"
    "fox,4,omnivore,hot,yes,false,indeed\n"
    "platypus,4,carnivore,hot,yes,true,indeed\n";

constexpr std::string_view kCsvWrong =
    "name,legs count,diet,blood,body hair,eggs,breastfeeding\n"
    "rabbit,6,carnivore,cold,no,true,negative\n"
    "human,4,herbivore,cold,no,true,negative\n"
    "fox,6,herbivore,cold,no,true,negative\n"
    "platypus,6,omnivore,cold,no,false,negative\n";

constexpr std::string_view kCsvHashed =
    "354C31,DBCEEF,6CE255,199D26,D59553,331981,869F50\n"
    "B2895C,B0FAAD,9ED0E8,D11884,269963,ADC8A2,999999\n"
    "1520D1,49E95E,A6463C,D11884,269963,ADC8A2,999999\n"
    "0BEA8D,B0FAAD,A6463C,D11884,269963,ADC8A2,999999\n"
    "7EA60D,B0FAAD,C5B9CC,D11884,269963,420666,999999\n";

}  // namespace

ValueBijection ValueBijection::inverse() const {
    ValueBijection out;
    out.scope = scope;
    out.pairs.reserve(pairs.size());
    for (const auto& [from, to] : pairs) out.pairs.emplace_back(to, from);
    return out;
}

TransactionTable parse_table(std::string_view text) {
    TransactionTable table;
    bool have_header = false;
    std::size_t data_row = 0;
    for (std::string_view line : detail::split_lines(text)) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells;
        for (std::string_view cell : detail::split(line, ',')) cells.emplace_back(detail::trim(cell));
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        ++data_row;
        if (cells.size() != table.header.size()) throw RaggedTable(data_row);
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw EmptyTable();
    return table;
}

std::string format_table(const TransactionTable& table) {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    return out;
}

void require_cross_column_unique(const TransactionTable& table) {
    std::unordered_map<std::string, std::size_t> column_of;
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto [it, inserted] = column_of.emplace(row[c], c);
            if (!inserted && it->second != c) throw NotCrossColumnUnique(row[c]);
        }
    }
}

TransactionTable apply_bijection(const TransactionTable& table, const ValueBijection& bijection) {
    require_cross_column_unique(table);

    std::unordered_map<std::string, std::string> image;
    std::map<std::string, std::string> preimage;
    for (const auto& [from, to] : bijection.pairs) {
        auto [it, inserted] = image.emplace(from, to);
        if (!inserted && it->second != to)
            throw NotInjective("'" + from + "' has two images");
        auto [pit, pinserted] = preimage.emplace(to, from);
        if (!pinserted && pit->second != from)
            throw NotInjective("'" + pit->second + "' and '" + from + "' both map to '" + to + "'");
    }

    auto map_cell = [&image](const std::string& cell) -> const std::string& {
        auto it = image.find(cell);
        if (it == image.end()) throw IncompleteBijection(cell);
        return it->second;
    };

    TransactionTable out;
    out.header.reserve(table.header.size());
    for (const auto& name : table.header)
        out.header.push_back(bijection.scope == BijectionScope::CellsAndHeader ? map_cell(name) : name);
    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::vector<std::string> mapped;
        mapped.reserve(row.size());
        for (const auto& cell : row) mapped.push_back(map_cell(cell));
        out.rows.push_back(std::move(mapped));
    }
    return out;
}

ValueBijection parse_bijection(std::string_view text, BijectionScope scope) {
    ValueBijection out;
    out.scope = scope;
    std::size_t lineno = 0;
    for (std::string_view line : detail::split_lines(text)) {
        ++lineno;
        std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto arrow = body.find("=>");
        if (arrow == std::string_view::npos)
            throw ConfigError("bijection line " + std::to_string(lineno) + " lacks '=>'");
        std::string from(detail::trim(body.substr(0, arrow)));
        std::string to(detail::trim(body.substr(arrow + 2)));
        if (from.empty() || to.empty())
            throw ConfigError("bijection line " + std::to_string(lineno) + " has an empty side");
        if (from.find(',') != std::string::npos || to.find(',') != std::string::npos)
            throw ConfigError("bijection line " + std::to_string(lineno) + " contains a comma");
        out.pairs.emplace_back(std::move(from), std::move(to));
    }
    return out;
}

const BuiltinDatasets& builtin_datasets() {
    static const BuiltinDatasets datasets{
        parse_table(kCsvCorrect),
        parse_table(kCsvWrong),
        parse_table(kCsvHashed),
    };
    return datasets;
}

const ValueBijection& wrong_mapping() {
    static const ValueBijection mapping{
        {
            {"rabbit", "rabbit"},
            {"human", "human"},
            {"fox", "fox"},
            {"platypus", "platypus"},
            {"4", "6"},
            {"2", "4"},
            {"herbivore", "carnivore"},
            {"omnivore", "herbivore"},
            {"carnivore", "omnivore"},
            {"hot", "cold"},
            {"yes", "no"},
            {"false", "true"},
            {"true", "false"},
            {"indeed", "negative"},
        },
        BijectionScope::CellsOnly,
    };
    return mapping;
}

const ValueBijection& hash_mapping() {
    static const ValueBijection mapping{
        {
            {"name", "354C31"},
            {"legs count", "DBCEEF"},
            {"diet", "6CE255"},
            {"blood", "199D26"},
            {"body hair", "D59553"},
            {"eggs", "331981"},
            {"breastfeeding", "869F50"},
            {"rabbit", "B2895C"},
            {"human", "1520D1"},
            {"fox", "0BEA8D"},
            {"platypus", "7EA60D"},
            {"4", "B0FAAD"},
            {"2", "49E95E"},
            {"herbivore", "9ED0E8"},
            {"omnivore", "A6463C"},
            {"carnivore", "C5B9CC"},
            {"hot", "D11884"},
            {"yes", "269963"},
            {"false", "ADC8A2"},
            {"true", "420666"},
            {"indeed", "999999"},
        },
        BijectionScope::CellsAndHeader,
    };
    return mapping;
}

}  // namespace hashprompt::corpus
