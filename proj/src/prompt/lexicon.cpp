// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/prompt/lexicon.hpp"

namespace wordcraft::prompt {

const Lexicon& default_lexicon() {
    static const Lexicon lexicon = {
        {"festive", {"red", "dots"}},
        {"calm", {"blue", "solid"}},
        {"ocean", {"blue", "stripes"}},
        {"sea", {"blue", "stripes"}},
        {"forest", {"green", "solid"}},
        {"leafy", {"green", "dots"}},
        {"spring", {"green", "dots"}},
        {"fire", {"red", "solid"}},
        {"fiery", {"red", "stripes"}},
        {"stone", {"gray", "solid"}},
        {"metal", {"gray", "stripes"}},
        {"chess", {"gray", "checker"}},
        {"picnic", {"red", "checker"}},
        {"night", {"blue-background"}},
        {"misty", {"gray-background"}},
        {"meadow", {"green-background"}},
    };
    return lexicon;
}

TokenList expand_abstract(const TokenList& tokens, const Lexicon& lexicon) {
    TokenList out;
    out.reserve(tokens.size());
    for (const std::string& token : tokens) {
        auto it = lexicon.find(token);
        if (it == lexicon.end()) {
            out.push_back(token);
        } else {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    return out;
}

PromptBundle expand_bundle(PromptBundle bundle, const Lexicon& lexicon) {
    if (bundle.base_prompt) bundle.base_prompt = expand_abstract(*bundle.base_prompt, lexicon);
    for (RegionPrompt& r : bundle.regions) r.prompt = expand_abstract(r.prompt, lexicon);
    return bundle;
}

}  // namespace wordcraft::prompt
