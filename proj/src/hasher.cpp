#include "hashprompt/hasher.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "hashprompt/error.hpp"
#include "text_util.hpp"

namespace hashprompt::hasher {

namespace {

constexpr std::string_view kUpper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr std::string_view kLowerAlnum = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::string_view kUpperHex = "0123456789ABCDEF";

bool all_in(std::string_view s, std::string_view alphabet) {
    return std::all_of(s.begin(), s.end(), [&](char c) { return alphabet.find(c) != std::string_view::npos; });
}

bool valid_identifier(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0;
    });
}

// Rewrites every boundary-delimited match of `needles` in one pass. Needles are
// tried longest first; `replacement(i)` gives the text for needle i.
template <typename Replacement>
std::string rewrite(std::string_view text, const std::vector<std::string_view>& needles, Replacement replacement,
                    std::size_t* hits = nullptr) {
    std::vector<std::size_t> order(needles.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return needles[a].size() > needles[b].size(); });

    std::string out;
    out.reserve(text.size());
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        bool matched = false;
        if (pos == 0 || !detail::is_word_char(text[pos - 1])) {
            for (std::size_t idx : order) {
                std::string_view needle = needles[idx];
                if (needle.empty() || text.compare(pos, needle.size(), needle) != 0) continue;
                if (!detail::at_word_boundary(text, pos, needle.size())) continue;
                out += replacement(idx);
                pos += needle.size();
                ++count;
                matched = true;
                break;
            }
        }
        if (!matched) out += text[pos++];
    }
    if (hits) *hits = count;
    return out;
}

std::vector<std::string_view> surfaces_of(const HashingScheme& scheme) {
    std::vector<std::string_view> out;
    for (const auto& e : scheme.entries()) out.push_back(e.surface);
    return out;
}

bool contains_identifier(std::string_view text, std::string_view id) {
    for (auto pos = text.find(id); pos != std::string_view::npos; pos = text.find(id, pos + 1))
        if (detail::at_word_boundary(text, pos, id.size())) return true;
    return false;
}

std::string draw(std::mt19937_64& rng, IdentifierKind kind) {
    auto pick = [&rng](std::string_view alphabet) { return alphabet[rng() % alphabet.size()]; };
    std::string id;
    switch (kind) {
        case IdentifierKind::SingleLetter:
            id += pick(kUpper);
            break;
        case IdentifierKind::ShortAlnum: {
            std::size_t len = 4 + rng() % 2;
            for (std::size_t i = 0; i < len; ++i) id += pick(kLowerAlnum);
            break;
        }
        case IdentifierKind::Hex6:
            for (int i = 0; i < 6; ++i) id += pick(kUpperHex);
            break;
    }
    return id;
}

}  // namespace

bool conforms(std::string_view identifier, IdentifierKind kind) {
    switch (kind) {
        case IdentifierKind::SingleLetter:
            return identifier.size() == 1 && all_in(identifier, kUpper);
        case IdentifierKind::ShortAlnum:
            return (identifier.size() == 4 || identifier.size() == 5) && all_in(identifier, kLowerAlnum);
        case IdentifierKind::Hex6:
            return identifier.size() == 6 && all_in(identifier, kUpperHex);
    }
    return false;
}

HashingScheme::HashingScheme(std::vector<SchemeEntry> entries) : entries_(std::move(entries)) {
    std::unordered_set<std::string> surfaces;
    for (const auto& e : entries_) {
        if (e.surface.empty()) throw InvalidScheme("empty surface");
        if (!valid_identifier(e.identifier))
            throw InvalidScheme("identifier '" + e.identifier + "' must be non-empty and alphanumeric");
        if (!surfaces.insert(e.surface).second) throw DuplicateSurface(e.surface);
    }
    for (const auto& e : entries_)
        if (surfaces.contains(e.identifier))
            throw InvalidScheme("identifier '" + e.identifier + "' is also a surface");
}

const SchemeEntry* HashingScheme::find_surface(std::string_view surface) const {
    for (const auto& e : entries_)
        if (e.surface == surface) return &e;
    return nullptr;
}

const SchemeEntry* HashingScheme::find_identifier(std::string_view identifier) const {
    for (const auto& e : entries_)
        if (e.identifier == identifier) return &e;
    return nullptr;
}

HashingScheme generate_scheme(const std::vector<std::string>& surfaces, const IdentifierStyle& style,
                              const std::vector<std::optional<IdentifierKind>>& per_entry_kind) {
    if (!per_entry_kind.empty() && per_entry_kind.size() != surfaces.size())
        throw InvalidScheme("per-entry style list must match the surface count");

    std::set<std::string> seen;
    for (const auto& s : surfaces) {
        if (s.empty()) throw InvalidScheme("empty surface");
        if (!seen.insert(s).second) throw DuplicateSurface(s);
    }

    constexpr int kMaxAttempts = 10000;
    std::mt19937_64 rng(style.seed);
    std::unordered_set<std::string> used;
    std::vector<SchemeEntry> entries;
    entries.reserve(surfaces.size());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        IdentifierKind kind = style.kind;
        if (!per_entry_kind.empty() && per_entry_kind[i]) kind = *per_entry_kind[i];

        std::string id;
        int attempt = 0;
        for (; attempt < kMaxAttempts; ++attempt) {
            id = draw(rng, kind);
            if (used.contains(id)) continue;
            bool inside_surface = std::any_of(surfaces.begin(), surfaces.end(),
                                              [&](const std::string& s) { return s.find(id) != std::string::npos; });
            if (!inside_surface) break;
        }
        if (attempt == kMaxAttempts) throw InvalidScheme("identifier style exhausted at '" + surfaces[i] + "'");
        used.insert(id);
        entries.push_back({surfaces[i], std::move(id), std::nullopt, std::nullopt});
    }
    return HashingScheme(std::move(entries));
}

std::string hash_text(std::string_view text, const HashingScheme& scheme) {
    if (scheme.empty()) return std::string(text);

    const SchemeEntry* collision = nullptr;
    for (const auto& e : scheme.entries()) {
        if (contains_identifier(text, e.identifier)) {
            collision = &e;
            break;
        }
    }
    const auto& entries = scheme.entries();
    std::size_t hits = 0;
    std::string out = rewrite(
        text, surfaces_of(scheme), [&](std::size_t i) -> const std::string& { return entries[i].identifier; }, &hits);
    if (collision && hits > 0) throw IdentifierCollision(collision->identifier);
    return out;
}

std::string dehash_text(std::string_view text, const HashingScheme& scheme) {
    std::vector<std::string_view> ids;
    std::vector<const std::string*> restore;
    for (const auto& e : scheme.entries()) {
        if (std::find(ids.begin(), ids.end(), e.identifier) != ids.end()) continue;
        ids.push_back(e.identifier);
        restore.push_back(&e.surface);
    }
    return rewrite(text, ids, [&](std::size_t i) -> const std::string& { return *restore[i]; });
}

std::string mask_text(std::string_view text, const HashingScheme& scheme) {
    return rewrite(text, surfaces_of(scheme), [](std::size_t) { return kMaskToken; });
}

HashingScheme parse_scheme(std::string_view text) {
    std::vector<SchemeEntry> entries;
    std::size_t lineno = 0;
    for (std::string_view line : detail::split_lines(text)) {
        ++lineno;
        std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto fields = detail::split(body, '|');
        if (fields.size() < 2 || fields.size() > 4)
            throw InvalidScheme("scheme line " + std::to_string(lineno) + " needs 2 to 4 '|'-separated fields");
        SchemeEntry e;
        e.surface = std::string(detail::trim(fields[0]));
        e.identifier = std::string(detail::trim(fields[1]));
        if (fields.size() > 2 && !detail::trim(fields[2]).empty())
            e.neutral_description = std::string(detail::trim(fields[2]));
        if (fields.size() > 3 && !detail::trim(fields[3]).empty())
            e.relationship_note = std::string(detail::trim(fields[3]));
        entries.push_back(std::move(e));
    }
    return HashingScheme(std::move(entries));
}

std::string format_scheme(const HashingScheme& scheme) {
    std::string out;
    for (const auto& e : scheme.entries()) {
        out += e.surface + " | " + e.identifier;
        if (e.neutral_description || e.relationship_note) out += " | " + e.neutral_description.value_or("");
        if (e.relationship_note) out += " | " + *e.relationship_note;
        out += '\n';
    }
    return out;
}

const HashingScheme& linda_scheme() {
    static const HashingScheme scheme({
        {"woman", "X", "person", std::nullopt},
        {"long hair", "cdf14", "a property describing their hair", std::nullopt},
        {"colorful coat", "a214s", "a property describing their clothing style", std::nullopt},
        {"corner of a caf\xC3\xA9", "fg57", "a location", std::nullopt},
        {"reading", "rfg5a", "doing activity", std::nullopt},
        {"artist", "b321", "type of occupation", "b321 is a type of occupation possibly linked to property cdf14"},
        {"read", "4l5i", "a hobby", "4l5i is a hobby possibly linked to activity rfg5a"},
        {"likes to read", "4l5i", "a hobby", "4l5i is a hobby possibly linked to activity rfg5a"},
    });
    return scheme;
}

const HashingScheme& tabular_linda_scheme() {
    static const HashingScheme scheme = [] {
        auto entries = linda_scheme().entries();
        entries.push_back({"sitting", "bh49k", std::nullopt, std::nullopt});
        return HashingScheme(std::move(entries));
    }();
    return scheme;
}

}  // namespace hashprompt::hasher
