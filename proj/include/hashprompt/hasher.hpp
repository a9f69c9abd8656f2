#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hashprompt::hasher {

enum class IdentifierKind {
    SingleLetter,  ///< one uppercase letter, e.g. "X"
    ShortAlnum,    ///< 4-5 lowercase alphanumerics, e.g. "cdf14"
    Hex6,          ///< six uppercase hex digits, e.g. "354C31"
};

struct IdentifierStyle {
    IdentifierKind kind = IdentifierKind::Hex6;
    std::uint64_t seed = 0;
};

/// True when `identifier` is drawn from the alphabet and length range of `kind`.
bool conforms(std::string_view identifier, IdentifierKind kind);

struct SchemeEntry {
    std::string surface;
    std::string identifier;
    std::optional<std::string> neutral_description;
    std::optional<std::string> relationship_note;

    bool operator==(const SchemeEntry&) const = default;
};

/// Ordered surface -> identifier map.
///
/// Surfaces are pairwise distinct. Identifiers are distinct too, except that several
/// surfaces may alias one identifier (the "read" / "likes to read" pair of the
/// Linda material); the first entry listed for an identifier is the one dehashing
/// restores.
class HashingScheme {
public:
    HashingScheme() = default;
    /// Throws DuplicateSurface or InvalidScheme.
    explicit HashingScheme(std::vector<SchemeEntry> entries);

    const std::vector<SchemeEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    const SchemeEntry* find_surface(std::string_view surface) const;
    /// First entry carrying `identifier`, or nullptr.
    const SchemeEntry* find_identifier(std::string_view identifier) const;

    bool operator==(const HashingScheme&) const = default;

private:
    std::vector<SchemeEntry> entries_;
};

/// Deterministic identifiers for `surfaces`. `per_entry_kind`, when non-empty, must
/// have one slot per surface; an engaged slot overrides `style.kind` for that entry.
/// Candidates equal to another identifier or contained in any surface are
/// rejected and redrawn. Throws DuplicateSurface, InvalidScheme when a kind runs out
/// of fresh identifiers.
HashingScheme generate_scheme(const std::vector<std::string>& surfaces, const IdentifierStyle& style,
                              const std::vector<std::optional<IdentifierKind>>& per_entry_kind = {});

/// Replaces every surface occurrence by its identifier in a single left-to-right
/// pass, longest surface first. Surfaces that begin or end with a word character
/// only match at word boundaries. Throws IdentifierCollision when the text already
/// contains an identifier and at least one substitution would be made.
std::string hash_text(std::string_view text, const HashingScheme& scheme);

/// Restores surfaces. Identifiers match on word boundaries only; anything unknown
/// passes through untouched.
std::string dehash_text(std::string_view text, const HashingScheme& scheme);

inline constexpr std::string_view kMaskToken = "\xE2\x80\x94";  // U+2014

/// Replaces every surface by kMaskToken. Same matching rules as hash_text.
std::string mask_text(std::string_view text, const HashingScheme& scheme);

/// Scheme file: one `surface | identifier | neutral_description? | relationship_note?`
/// entry per line. Blank lines and lines starting with '#' are skipped.
HashingScheme parse_scheme(std::string_view text);
std::string format_scheme(const HashingScheme& scheme);

/// Identifiers, surfaces and neutral descriptions of the free-text Linda material.
/// "read" and "likes to read" share 4l5i, with "read" listed first.
const HashingScheme& linda_scheme();

/// linda_scheme() plus the tabular-only entry sitting -> bh49k.
const HashingScheme& tabular_linda_scheme();

}  // namespace hashprompt::hasher
