#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "debate/errors.hpp"
#include "debate/model.hpp"

namespace debate {

enum class TemplateRole {
    Persuader,
    Debater,
    FallaciousHelper,
    LogicalHelper,
    ModeratorConvinced,
    ModeratorTopic,
    ModeratorPleasantry,
    Verifier,
};

constexpr TemplateRole kAllTemplateRoles[] = {
    TemplateRole::Persuader,          TemplateRole::Debater,
    TemplateRole::FallaciousHelper,   TemplateRole::LogicalHelper,
    TemplateRole::ModeratorConvinced, TemplateRole::ModeratorTopic,
    TemplateRole::ModeratorPleasantry, TemplateRole::Verifier,
};

// body may reference {CLAIM}, {REASON}, and {TOPIC}; no other {ALL_CAPS}
// placeholder is allowed.
struct PromptTemplate {
    TemplateRole role = TemplateRole::Persuader;
    std::string body;
};

std::string to_string(TemplateRole role);
TemplateRole template_role_from_string(const std::string& name);

// The snake_case file name a role's template is stored under, e.g.
// "moderator_convinced.txt".
std::string template_file_name(TemplateRole role);

// Built-in template for the role; identical to the bundled asset file.
PromptTemplate default_template(TemplateRole role);

// Reads <dir>/<template_file_name(role)> when it exists, otherwise falls
// back to the built-in default. An empty dir always uses the default.
PromptTemplate load_template(TemplateRole role, const std::filesystem::path& dir);

// Substitutes every {ALL_CAPS} placeholder with the matching claim field.
// Throws UnknownPlaceholder for any placeholder outside {CLAIM}/{REASON}/{TOPIC}.
std::string render_template(const PromptTemplate& tmpl, const ClaimRecord& claim);

// ---------------------------------------------------------------------------
// Fallacy taxonomy
// ---------------------------------------------------------------------------

// Canonical lowercase names of the nine fallacy types the fallacious helper
// is instructed to choose from.
const std::vector<std::string>& fallacy_taxonomy();

// Lowercases, trims, collapses runs of whitespace, strips trailing
// punctuation, and maps known aliases onto canonical taxonomy names.
std::string normalize_fallacy_label(const std::string& label);

bool label_on_taxonomy(const std::string& label);

}  // namespace debate
