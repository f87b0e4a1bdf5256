// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "wordcraft/prompt/bundle.hpp"

namespace wordcraft::prompt {

/// Abstract token -> concrete vocabulary tokens.
using Lexicon = std::map<std::string, TokenList, std::less<>>;

/// Built-in lexicon for the style vocabulary (e.g. festive -> red dots).
const Lexicon& default_lexicon();

/// Replaces each abstract token by its expansion, once, in order. Tokens the
/// lexicon does not know pass through unchanged.
TokenList expand_abstract(const TokenList& tokens, const Lexicon& lexicon);

/// expand_abstract applied to the base prompt and every region prompt.
PromptBundle expand_bundle(PromptBundle bundle, const Lexicon& lexicon);

}  // namespace wordcraft::prompt
