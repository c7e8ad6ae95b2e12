#include <doctest.h>

#include "debate/prompts.hpp"
#include "support/fixtures.hpp"

using namespace debate;

TEST_SUITE("prompts") {

TEST_CASE("template role names round-trip") {
    for (TemplateRole role : kAllTemplateRoles) {
        CHECK(template_role_from_string(to_string(role)) == role);
    }
    CHECK_THROWS_AS(template_role_from_string("Helper"), ParseError);
}

TEST_CASE("template file names are snake_case") {
    CHECK(template_file_name(TemplateRole::Persuader) == "persuader.txt");
    CHECK(template_file_name(TemplateRole::FallaciousHelper) == "fallacious_helper.txt");
    CHECK(template_file_name(TemplateRole::ModeratorConvinced) == "moderator_convinced.txt");
    CHECK(template_file_name(TemplateRole::Verifier) == "verifier.txt");
}

TEST_CASE("built-in templates cover their required placeholders") {
    auto persuader = default_template(TemplateRole::Persuader);
    CHECK(persuader.body.find("{CLAIM}") != std::string::npos);
    CHECK(persuader.body.find("{REASON}") != std::string::npos);

    auto debater = default_template(TemplateRole::Debater);
    CHECK(debater.body.find("{CLAIM}") != std::string::npos);

    auto fallacious = default_template(TemplateRole::FallaciousHelper);
    CHECK(fallacious.body.find("FALLACY:") != std::string::npos);
    CHECK(fallacious.body.find("ARGUMENT:") != std::string::npos);
    CHECK(fallacious.body.find("Do not disclose any fallacy") != std::string::npos);

    auto logical = default_template(TemplateRole::LogicalHelper);
    CHECK(logical.body.find("ARGUMENT:") != std::string::npos);
    CHECK(logical.body.find("FALLACY:") == std::string::npos);

    for (TemplateRole role : {TemplateRole::ModeratorConvinced, TemplateRole::ModeratorTopic,
                              TemplateRole::ModeratorPleasantry}) {
        CHECK(default_template(role).body.find("YES or NO") != std::string::npos);
    }
}

TEST_CASE("bundled prompt assets match the built-in templates byte for byte") {
    std::filesystem::path dir = std::filesystem::path(ASSETS_DIR) / "prompts";
    for (TemplateRole role : kAllTemplateRoles) {
        REQUIRE(std::filesystem::exists(dir / template_file_name(role)));
        CHECK(load_template(role, dir).body == default_template(role).body);
    }
}

TEST_CASE("template loading falls back to the built-in body") {
    CHECK(load_template(TemplateRole::Debater, "").body ==
          default_template(TemplateRole::Debater).body);
    CHECK(load_template(TemplateRole::Debater, "/nonexistent/dir").body ==
          default_template(TemplateRole::Debater).body);

    testsupport::TempDir dir("templates");
    write_file_atomic(dir.path() / "debater.txt", "custom body with {CLAIM}\n");
    CHECK(load_template(TemplateRole::Debater, dir.path()).body == "custom body with {CLAIM}\n");
    // Other roles in the same dir still fall back.
    CHECK(load_template(TemplateRole::Persuader, dir.path()).body ==
          default_template(TemplateRole::Persuader).body);
}

TEST_CASE("rendering substitutes claim fields") {
    ClaimRecord claim = testsupport::sample_claim();
    PromptTemplate tmpl{TemplateRole::Persuader,
                        "claim={CLAIM} reason={REASON} topic={TOPIC} again={CLAIM}"};
    CHECK(render_template(tmpl, claim) == "claim=" + claim.claim + " reason=" + claim.reason +
                                              " topic=" + claim.topic + " again=" + claim.claim);
}

TEST_CASE("unknown placeholders are rejected, stray braces pass through") {
    ClaimRecord claim = testsupport::sample_claim();
    CHECK_THROWS_AS(
        render_template(PromptTemplate{TemplateRole::Persuader, "use {MODEL} here"}, claim),
        UnknownPlaceholder);
    CHECK(render_template(PromptTemplate{TemplateRole::Persuader, "json {\"k\": 1} stays"},
                          claim) == "json {\"k\": 1} stays");
    CHECK(render_template(PromptTemplate{TemplateRole::Persuader, "open {CLAIM"}, claim) ==
          "open {CLAIM");
    CHECK(render_template(PromptTemplate{TemplateRole::Persuader, "{} empty"}, claim) ==
          "{} empty");
    CHECK(render_template(PromptTemplate{TemplateRole::Persuader, "{lower} case"}, claim) ==
          "{lower} case");
}

TEST_CASE("the fallacy taxonomy lists nine lowercase names") {
    const auto& taxonomy = fallacy_taxonomy();
    REQUIRE(taxonomy.size() == 9);
    for (const auto& name : taxonomy) {
        CHECK(normalize_fallacy_label(name) == name);
        CHECK(label_on_taxonomy(name));
    }
    CHECK(std::find(taxonomy.begin(), taxonomy.end(), "straw man") != taxonomy.end());
    CHECK(std::find(taxonomy.begin(), taxonomy.end(), "appeal to emotion") != taxonomy.end());
}

TEST_CASE("label normalization lowercases, trims, and maps aliases") {
    CHECK(normalize_fallacy_label("  Ad Hominem. ") == "ad hominem");
    CHECK(normalize_fallacy_label("Ad-Hominem") == "ad hominem");
    CHECK(normalize_fallacy_label("Strawman") == "straw man");
    CHECK(normalize_fallacy_label("False Dilemna") == "false dilemma");
    CHECK(normalize_fallacy_label("appeal to the popular opinion") ==
          "appeal to popular opinion");
    CHECK(normalize_fallacy_label("Appeal To Popularity") == "appeal to popular opinion");
    CHECK(normalize_fallacy_label("Misinformation!") == "false information");
    CHECK(normalize_fallacy_label("appeal  to\temotion") == "appeal to emotion");
    CHECK(normalize_fallacy_label("") == "");
    CHECK(label_on_taxonomy("STRAW MAN"));
    CHECK_FALSE(label_on_taxonomy("tu quoque"));
}

}
