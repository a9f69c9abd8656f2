#include <gtest/gtest.h>

#include "hashprompt/error.hpp"
#include "hashprompt/hasher.hpp"
#include "hashprompt/prompts.hpp"

namespace hp = hashprompt;
using namespace hp::prompts;

namespace {

bool contains(const std::string& text, std::string_view needle) { return text.find(needle) != std::string::npos; }

std::size_t count(const std::string& text, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
    return n;
}

const LindaKey& linda_key(const RenderedPrompt& p) { return std::get<LindaKey>(p.answer_key); }

}  // namespace

TEST(LindaFreeText, OriginalAnchor) {
    auto p = render_linda(Form::Original);
    EXPECT_TRUE(contains(p.text, "Imagine a woman with long hair and a colorful coat"));
    EXPECT_TRUE(contains(p.text, "A) She is an artist\nB) She is an artist who likes to read"));
}

TEST(LindaFreeText, HashedWithDescAnchor) {
    auto p = render_linda(Form::HashedWithDesc);
    EXPECT_TRUE(contains(p.text, "(b321 is a type of occupation possibly linked to property cdf14)"));
    EXPECT_TRUE(contains(p.text, "X is b321 who likes to 4l5i."));
}

TEST(LindaFreeText, HashedWithoutDescAnchor) {
    auto p = render_linda(Form::HashedWithoutDesc);
    EXPECT_TRUE(contains(p.text, "Imagine X with a cdf14 and a a214s, sitting in a fg57 rfg5a."));
    EXPECT_TRUE(contains(p.text, "X is b321 who 4l5i."));
}

TEST(LindaFreeText, ValidationAnchor) {
    auto p = render_linda(Form::Validation);
    EXPECT_TRUE(contains(p.text, "likes to read is a hobby possibly linked to activity reading"));
}

TEST(LindaFreeText, QuestionAndTwoOptions) {
    for (auto f : {Form::Original, Form::HashedWithDesc, Form::HashedWithoutDesc, Form::Validation})
        for (bool pre : {true, false}) {
            auto p = render_linda(f, pre);
            EXPECT_EQ(count(p.text, kLindaQuestion), 1u);
            const auto& k = linda_key(p);
            EXPECT_EQ(k.correct_index, 0u);
            EXPECT_TRUE(contains(p.text, k.options[0]));
            EXPECT_TRUE(contains(p.text, k.options[1]));
            std::string shorter = k.options[0];
            if (shorter.ends_with('.')) shorter.pop_back();
            EXPECT_TRUE(contains(k.options[1], shorter));
            EXPECT_NE(k.options[0], k.options[1]);
        }
}

TEST(LindaFreeText, PreambleSwitch) {
    auto on = render_linda(Form::HashedWithDesc, true);
    auto off = render_linda(Form::HashedWithDesc, false);
    EXPECT_TRUE(on.text.starts_with(kPreambleClause));
    EXPECT_FALSE(contains(off.text, "Pretend to be an agent"));
    EXPECT_TRUE(off.text.starts_with("Do the following thought exercise."));
    EXPECT_EQ(on.text.size() - off.text.size(), kPreambleClause.size());
}

TEST(LindaFreeText, InvalidForm) { EXPECT_THROW(render_linda(Form::NotHashed), hp::UnknownVariant); }

TEST(Linda, HashedFormsCarryNoSurfaces) {
    for (auto f : {Form::HashedWithDesc, Form::HashedWithoutDesc}) {
        auto p = render_linda(f);
        EXPECT_EQ(hp::hasher::mask_text(p.text, hp::hasher::linda_scheme()), p.text) << to_string(f);
    }
    for (auto f : {Form::HashedWithRel, Form::HashedWithoutRel}) {
        auto p = render_tabular_linda(f);
        EXPECT_EQ(hp::hasher::mask_text(p.text, hp::hasher::tabular_linda_scheme()), p.text) << to_string(f);
    }
}

TEST(Itemset, CorrectLengthThree) {
    auto p = render_itemset(Dataset::Correct, 3);
    EXPECT_TRUE(contains(p.text, "minimal support equal to 2 and length 3, so set_length_3 ="));
    EXPECT_TRUE(contains(p.text, "name,legs count"));
    EXPECT_TRUE(p.text.ends_with("IMPORTANT: You are not allowed to use programming languages to solve this task!"));
}

TEST(Itemset, HashedDataBlock) {
    auto p = render_itemset(Dataset::Hashed, 5);
    EXPECT_TRUE(contains(p.text, "\n354C31,DBCEEF"));
    EXPECT_TRUE(contains(p.text, "length 5, so set_length_ 5={"));
}

TEST(Itemset, WrongRabbitRow) {
    auto p = render_itemset(Dataset::Wrong, 1);
    EXPECT_TRUE(contains(p.text, "\nrabbit,6,carnivore,cold,no,true,negative\n"));
}

TEST(Itemset, BothPlaceholdersFilled) {
    for (auto d : {Dataset::Correct, Dataset::Wrong, Dataset::Hashed})
        for (int k = 1; k <= 5; ++k) {
            auto p = render_itemset(d, k);
            const auto n = std::to_string(k);
            EXPECT_FALSE(contains(p.text, "@"));
            EXPECT_TRUE(contains(p.text, "and length " + n + ", so"));
            EXPECT_TRUE(contains(p.text, d == Dataset::Correct ? "set_length_" + n + " =" : "set_length_ " + n + "="));
            EXPECT_EQ(std::get<hp::miner::MiningTask>(p.answer_key), (hp::miner::MiningTask{2, static_cast<std::size_t>(k)}));
        }
}

TEST(Itemset, LengthRange) {
    EXPECT_THROW(render_itemset(Dataset::Correct, 0), hp::InvalidLength);
    EXPECT_THROW(render_itemset(Dataset::Correct, 6), hp::InvalidLength);
}

TEST(Tabular, NotHashedHeader) {
    auto p = render_tabular_linda(Form::NotHashed);
    EXPECT_TRUE(contains(p.text, "gender, hair_style, clothing_description, location, position, activity"));
    EXPECT_TRUE(linda_key(p).lettered);
}

TEST(Tabular, HashedWithRelRow) {
    auto p = render_tabular_linda(Form::HashedWithRel);
    EXPECT_TRUE(contains(p.text, "X, cdf14, a214s, fg57, bh49k, rfg5a,"));
    EXPECT_EQ(count(p.text, "\n("), 2u);
}

TEST(Tabular, HashedWithoutRelDropsRelationshipLines) {
    auto with = render_tabular_linda(Form::HashedWithRel);
    auto without = render_tabular_linda(Form::HashedWithoutRel);
    EXPECT_EQ(count(without.text, "\n("), 0u);
    EXPECT_TRUE(with.text.starts_with(without.text));
    EXPECT_EQ(with.text.substr(without.text.size()),
              "\n(b321 is a type of occupation possibly linked to property cdf14)\n"
              "(4l5i is a hobby possibly linked to activity rfg5a)");
}

TEST(Tabular, InvalidForm) { EXPECT_THROW(render_tabular_linda(Form::Original), hp::UnknownVariant); }

TEST(Catalog, PathsRoundTrip) {
    EXPECT_EQ(template_paths().size(), 10u);
    for (const auto& path : template_paths()) {
        EXPECT_EQ(template_path(parse_template_path(path)), path);
        EXPECT_NO_THROW(render(parse_template_path(path), true, 2));
    }
    EXPECT_THROW(parse_template_path("linda-free-text/bogus"), hp::UnknownVariant);
}

TEST(Catalog, RenderIsDeterministic) {
    for (const auto& path : template_paths())
        EXPECT_EQ(render(parse_template_path(path), true, 4).text, render(parse_template_path(path), true, 4).text);
}
