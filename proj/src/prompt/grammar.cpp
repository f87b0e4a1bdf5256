// Copyright 2026 The Wordcraft Authors
// SPDX-License-Identifier: Apache-2.0

#include "wordcraft/prompt/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace wordcraft::prompt {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    PromptBundle run() {
        skip_space();
        while (pos_ < text_.size()) {
            directive();
            skip_space();
            if (pos_ == text_.size()) break;
            expect(';', "';' or end of input");
            skip_space();
        }
        return finish();
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    void expect(char c, const char* what) {
        if (pos_ >= text_.size() || text_[pos_] != c) throw PromptError::syntax(pos_, what);
        ++pos_;
    }

    std::string word() {
        const std::size_t begin = pos_;
        while (pos_ < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(begin, pos_ - begin));
    }

    void directive() {
        const std::size_t at = pos_;
        const std::string keyword = word();
        skip_space();
        if (keyword == "char") {
            if (character_) throw PromptError::syntax(at, "a single 'char' directive");
            character_ = quoted();
        } else if (keyword == "task") {
            if (task_) throw PromptError::syntax(at, "a single 'task' directive");
            const std::size_t name_at = pos_;
            const std::string name = word();
            if (name == "global") task_ = TaskType::global;
            else if (name == "regions") task_ = TaskType::multi_regional;
            else if (name == "edit") task_ = TaskType::continuous_editing;
            else throw PromptError::syntax(name_at, "'global', 'regions' or 'edit'");
        } else if (keyword == "base") {
            if (base_) throw PromptError::syntax(at, "a single 'base' directive");
            expect(':', "':' after 'base'");
            base_ = tokens();
        } else if (keyword == "region") {
            const std::size_t id_at = pos_;
            long id = 0;
            std::size_t digits = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                id = std::min(id * 10 + (text_[pos_] - '0'), 1000000L);
                ++pos_;
                ++digits;
            }
            if (digits == 0 || id < 1) throw PromptError::syntax(id_at, "region number >= 1");
            skip_space();
            expect(':', "':' after region number");
            TokenList prompt = tokens();
            if (!regions_.emplace(static_cast<int>(id), std::move(prompt)).second) {
                throw PromptError(PromptErrc::DuplicateRegion, "region " + std::to_string(id) + " appears twice");
            }
        } else {
            throw PromptError::syntax(at, "'char', 'task', 'base' or 'region'");
        }
    }

    std::string quoted() {
        expect('"', "'\"'");
        std::string out;
        while (true) {
            if (pos_ >= text_.size()) throw PromptError::syntax(pos_, "closing '\"'");
            const char c = text_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (pos_ >= text_.size()) throw PromptError::syntax(pos_, "escaped character");
                const char e = text_[pos_++];
                if (e != '"' && e != '\\') throw PromptError::syntax(pos_ - 1, "'\"' or '\\' after '\\'");
                out.push_back(e);
            } else {
                out.push_back(c);
            }
        }
        if (out.empty()) throw PromptError(PromptErrc::EmptyCharacter, "character must be non-empty");
        return out;
    }

    TokenList tokens() {
        TokenList out;
        while (true) {
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] == ';') break;
            const std::size_t begin = pos_;
            while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != ';') {
                if (text_[pos_] == '"') throw PromptError::syntax(pos_, "prompt token character");
                ++pos_;
            }
            out.emplace_back(text_.substr(begin, pos_ - begin));
        }
        if (out.empty()) throw PromptError::syntax(pos_, "at least one prompt token");
        return out;
    }

    PromptBundle finish() {
        if (!character_) throw PromptError::syntax(text_.size(), "'char' directive");
        if (!task_) throw PromptError::syntax(text_.size(), "'task' directive");
        PromptBundle b;
        b.task = *task_;
        b.character = *character_;
        b.base_prompt = base_;
        for (auto& [id, prompt] : regions_) b.regions.push_back({id, prompt});
        if (b.task == TaskType::global && !b.regions.empty()) {
            throw PromptError(PromptErrc::RegionOnGlobal, "global task must not carry region prompts");
        }
        check_invariants(b);
        return b;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::optional<std::string> character_;
    std::optional<TaskType> task_;
    std::optional<TokenList> base_;
    std::map<int, TokenList> regions_;
};

const char* keyword(TaskType task) {
    switch (task) {
    case TaskType::global: return "global";
    case TaskType::multi_regional: return "regions";
    case TaskType::continuous_editing: return "edit";
    }
    return "global";
}

}  // namespace

PromptBundle parse_structured(std::string_view text) { return Parser(text).run(); }

std::string serialize_structured(const PromptBundle& bundle) {
    check_invariants(bundle);
    std::string out = "char \"";
    for (char c : bundle.character) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out += "\" ; task ";
    out += keyword(bundle.task);
    auto append_tokens = [&](const TokenList& tokens) {
        for (const std::string& t : tokens) {
            out += ' ';
            out += t;
        }
    };
    if (bundle.base_prompt) {
        out += " ; base:";
        append_tokens(*bundle.base_prompt);
    }
    for (const RegionPrompt& r : bundle.regions) {
        out += " ; region " + std::to_string(r.id) + ":";
        append_tokens(r.prompt);
    }
    return out;
}

}  // namespace wordcraft::prompt
