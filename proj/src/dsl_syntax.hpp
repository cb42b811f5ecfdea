#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kbt/dsl.hpp"

namespace kbt::dsl {

enum class Tok
{
    ident,
    integer,
    string,
    punct,
    end,
};

struct Token
{
    Tok kind = Tok::end;
    std::string text;
    int number = 0;
    SourceLocation location;
};

// Throws ParseError on a bad character or unterminated string.
std::vector<Token> lex(std::string_view text);

struct SyntaxError
{
    SourceLocation location;
    std::string message;
};

class Parser
{
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    // Whole model; syntax errors are collected, resyncing at the next
    // declaration keyword.
    std::vector<Declaration> declarations(std::vector<Diagnostic>& diagnostics);

    // A lone tree expression (infix_compose). Throws SyntaxError.
    TreeExpr tree_only();

    // Names visible to condition expressions.
    std::set<std::string> variables;

private:
    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at(std::string_view punct_or_word, std::size_t ahead = 0) const;
    bool accept(std::string_view punct_or_word);
    void expect(std::string_view punct_or_word);
    std::string ident(const char* what);
    int integer();
    [[noreturn]] void fail(const std::string& msg) const;

    Declaration declaration();
    std::vector<std::string> name_list();

    ConditionExpr condition();
    ConditionExpr cond_and();
    ConditionExpr cond_not();
    ConditionExpr cond_atom();

    std::string value_token();
    ReturnRule returns_block();
    TreeExpr tree_expr();
    TreeExpr tree_seq();
    TreeExpr tree_unary();
    TreeExpr tree_primary();
    std::vector<TreeExpr> tree_list();
    ScoreRule score_rule();
    DtExpr dt_expr();
    WorldArg world_arg();

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::map<std::string, ConditionExpr> conditions_;
};

} // namespace kbt::dsl
