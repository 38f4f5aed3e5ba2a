#include "diskmc/model.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <set>

namespace diskmc {

namespace {

enum class Tok : uint8_t {
    Ident, IntLit, RealLit,
    KwConst, KwVar, KwInit, KwProperty, KwPartition, KwBound, KwReward,
    KwMin, KwMax, KwTrue, KwFalse, KwPmax, KwPmin, KwRmax, KwRmin,
    LBracket, RBracket, LParen, RParen, Semi, Colon, DotDot, Arrow, Comma,
    Plus, Minus, Star, Slash, Eq, Ne, Lt, Le, Gt, Ge, Amp, Pipe, Bang,
    Question, Prime, End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int64_t int_value = 0;
    double real_value = 0.0;
    SourcePos pos;
};

const std::map<std::string, Tok, std::less<>> keywords = {
    {"const", Tok::KwConst},   {"var", Tok::KwVar},           {"init", Tok::KwInit},
    {"property", Tok::KwProperty}, {"partition", Tok::KwPartition}, {"bound", Tok::KwBound},
    {"reward", Tok::KwReward}, {"min", Tok::KwMin},           {"max", Tok::KwMax},
    {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
    {"Pmax", Tok::KwPmax},     {"Pmin", Tok::KwPmin},
    {"Rmax", Tok::KwRmax},     {"Rmin", Tok::KwRmin},
};

class Lexer {
public:
    Lexer(std::string_view text, std::vector<Diagnostic>& errors)
        : text_(text), errors_(errors) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::End) break;
        }
        return out;
    }

private:
    std::string_view text_;
    std::vector<Diagnostic>& errors_;
    size_t i_ = 0;
    uint32_t line_ = 1, col_ = 1;

    char peek(size_t ahead = 0) const {
        return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
    }
    char advance() {
        char c = text_[i_++];
        if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
        return c;
    }
    void skip_space() {
        while (i_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (peek() == '/' && peek(1) == '/') {
                while (i_ < text_.size() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token next() {
        Token t;
        t.pos = {line_, col_};
        if (i_ >= text_.size()) return t;

        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                s += advance();
            auto kw = keywords.find(s);
            t.kind = kw != keywords.end() ? kw->second : Tok::Ident;
            t.text = std::move(s);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(t);

        advance();
        switch (c) {
        case '[': t.kind = Tok::LBracket; return t;
        case ']': t.kind = Tok::RBracket; return t;
        case '(': t.kind = Tok::LParen; return t;
        case ')': t.kind = Tok::RParen; return t;
        case ';': t.kind = Tok::Semi; return t;
        case ',': t.kind = Tok::Comma; return t;
        case ':': t.kind = Tok::Colon; return t;
        case '?': t.kind = Tok::Question; return t;
        case '\'': t.kind = Tok::Prime; return t;
        case '+': t.kind = Tok::Plus; return t;
        case '*': t.kind = Tok::Star; return t;
        case '/': t.kind = Tok::Slash; return t;
        case '=': t.kind = Tok::Eq; return t;
        case '-':
            if (peek() == '>') { advance(); t.kind = Tok::Arrow; } else { t.kind = Tok::Minus; }
            return t;
        case '!':
            if (peek() == '=') { advance(); t.kind = Tok::Ne; } else { t.kind = Tok::Bang; }
            return t;
        case '<':
            if (peek() == '=') { advance(); t.kind = Tok::Le; } else { t.kind = Tok::Lt; }
            return t;
        case '>':
            if (peek() == '=') { advance(); t.kind = Tok::Ge; } else { t.kind = Tok::Gt; }
            return t;
        case '&': t.kind = Tok::Amp; return t;
        case '|': t.kind = Tok::Pipe; return t;
        case '.':
            if (peek() == '.') { advance(); t.kind = Tok::DotDot; return t; }
            break;
        }
        errors_.push_back({t.pos, std::string("unexpected character '") + c + "'"});
        t.kind = Tok::End; // poison; parser stops at End
        return t;
    }

    Token lex_number(Token t) {
        std::string s;
        while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
        bool real = false;
        // '.' starts a fraction only when followed by a digit; "0..5" keeps
        // the range operator intact.
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            real = true;
            s += advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
        }
        if ((peek() == 'e' || peek() == 'E')) {
            size_t digits = (peek(1) == '+' || peek(1) == '-') ? 2 : 1;
            if (std::isdigit(static_cast<unsigned char>(peek(digits)))) {
                real = true;
                s += advance(); // e
                if (peek() == '+' || peek() == '-') s += advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
            }
        }
        t.text = s;
        if (real) {
            t.kind = Tok::RealLit;
            t.real_value = std::strtod(s.c_str(), nullptr);
        } else {
            t.kind = Tok::IntLit;
            t.int_value = std::strtoll(s.c_str(), nullptr, 10);
        }
        return t;
    }
};

// Thrown on a syntax error inside a declaration; the parser records the
// diagnostic first and recovers at the next ';'.
struct ParseAbort {};

class Parser {
public:
    Parser(std::string_view text, std::vector<Diagnostic>& errors) : errors_(errors) {
        toks_ = Lexer(text, errors).run();
    }

    // Pre-substituted constants, e.g. from an enclosing model (fragment mode).
    void seed_constants(const ModelAst& context) {
        for (const auto& c : context.constants) consts_[c.name] = c.value;
        for (const auto& v : context.variables) var_names_.insert(v.name);
    }

    ModelAst parse_model_body() {
        ModelAst m;
        while (!at(Tok::End)) {
            try {
                parse_decl(m);
            } catch (ParseAbort&) {
                while (!at(Tok::End) && !at(Tok::Semi)) ++pos_;
                if (at(Tok::Semi)) ++pos_;
            }
        }
        return m;
    }

    PropertyDecl parse_property_body() {
        PropertyDecl p = parse_property_tail("");
        expect_end();
        return p;
    }

    PartitionDecl parse_partition_body() {
        PartitionDecl p;
        p.pos = cur().pos;
        p.expr = parse_expr();
        expect(Tok::KwBound, "'bound'");
        p.bound = fold_int("partition bound");
        expect_end();
        return p;
    }

private:
    std::vector<Token> toks_;
    std::vector<Diagnostic>& errors_;
    size_t pos_ = 0;
    std::map<std::string, Value, std::less<>> consts_;
    std::set<std::string, std::less<>> var_names_;

    const Token& cur() const { return toks_[pos_]; }
    const Token& la(size_t n) const {
        size_t k = pos_ + n;
        return k < toks_.size() ? toks_[k] : toks_.back();
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) {
        errors_.push_back({cur().pos, msg});
        throw ParseAbort{};
    }
    void expect(Tok k, const char* what) {
        if (!accept(k)) fail(std::string("expected ") + what);
    }
    void expect_end() {
        if (!at(Tok::End)) fail("trailing input after declaration");
    }

    void parse_decl(ModelAst& m) {
        switch (cur().kind) {
        case Tok::KwConst: parse_const(m); return;
        case Tok::KwVar: parse_var(m); return;
        case Tok::LBracket: parse_command(m); return;
        case Tok::KwProperty: parse_property_decl(m); return;
        case Tok::KwPartition: parse_partition_decl(m); return;
        default: fail("expected declaration (const, var, [], property, partition)");
        }
    }

    std::string expect_fresh_name() {
        if (!at(Tok::Ident)) fail("expected identifier");
        std::string name = cur().text;
        if (consts_.count(name) || var_names_.count(name)) {
            errors_.push_back({cur().pos, "duplicate declaration of '" + name + "'"});
            throw ParseAbort{};
        }
        ++pos_;
        return name;
    }

    void parse_const(ModelAst& m) {
        SourcePos p = cur().pos;
        ++pos_;
        std::string name = expect_fresh_name();
        expect(Tok::Eq, "'='");
        Value v = fold_value("constant initializer");
        expect(Tok::Semi, "';'");
        consts_[name] = v;
        m.constants.push_back({name, v, p});
    }

    void parse_var(ModelAst& m) {
        SourcePos p = cur().pos;
        ++pos_;
        std::string name = expect_fresh_name();
        expect(Tok::Colon, "':'");
        int64_t lo = fold_int("lower bound");
        expect(Tok::DotDot, "'..'");
        int64_t hi = fold_int("upper bound");
        expect(Tok::KwInit, "'init'");
        int64_t init = fold_int("initial value");
        expect(Tok::Semi, "';'");
        if (lo > hi) fail_at(p, "empty domain: lower bound exceeds upper bound");
        if (init < lo || init > hi) fail_at(p, "initial value outside declared domain");
        if (lo < INT32_MIN || hi > INT32_MAX) fail_at(p, "domain exceeds 32-bit range");
        var_names_.insert(name);
        m.variables.push_back({name, static_cast<int32_t>(lo), static_cast<int32_t>(hi),
                               static_cast<int32_t>(init), p});
    }

    [[noreturn]] void fail_at(SourcePos p, const std::string& msg) {
        errors_.push_back({p, msg});
        throw ParseAbort{};
    }

    void parse_command(ModelAst& m) {
        Command c;
        c.pos = cur().pos;
        ++pos_;
        expect(Tok::RBracket, "']'");
        c.guard = parse_expr();
        expect(Tok::Arrow, "'->'");
        c.alternatives.push_back(parse_alternative());
        while (accept(Tok::Plus)) c.alternatives.push_back(parse_alternative());
        expect(Tok::Semi, "';'");
        m.commands.push_back(std::move(c));
    }

    // alt := [prob ':'] updates ['reward' expr]
    // updates := 'true' | '(' x '=' e ')' ('&' ...)*
    Alternative parse_alternative() {
        Alternative alt;
        bool bare_updates =
            (at(Tok::LParen) && la(1).kind == Tok::Ident && la(2).kind == Tok::Prime) ||
            (at(Tok::KwTrue) && la(1).kind != Tok::Colon && la(1).kind != Tok::Question);
        if (!bare_updates) {
            alt.probability = parse_expr();
            expect(Tok::Colon, "':'");
        }
        parse_updates(alt);
        // Multiplicative precedence only: a '+' after the reward separates
        // alternatives. Looser expressions need parentheses.
        if (accept(Tok::KwReward)) alt.reward = parse_mul();
        return alt;
    }

    void parse_updates(Alternative& alt) {
        if (accept(Tok::KwTrue)) return; // no change
        do {
            UpdateAssign u;
            u.pos = cur().pos;
            expect(Tok::LParen, "'('");
            if (!at(Tok::Ident)) fail("expected variable name in update");
            u.var = cur().text;
            if (!var_names_.count(u.var)) fail("unknown variable '" + u.var + "' in update");
            for (const auto& other : alt.updates)
                if (other.var == u.var) fail("variable '" + u.var + "' updated twice");
            ++pos_;
            expect(Tok::Prime, "'''");
            expect(Tok::Eq, "'='");
            u.value = parse_expr();
            expect(Tok::RParen, "')'");
            alt.updates.push_back(std::move(u));
        } while (accept(Tok::Amp));
    }

    void parse_property_decl(ModelAst& m) {
        ++pos_;
        std::string name = expect_fresh_name_soft(m);
        expect(Tok::Eq, "'='");
        PropertyDecl p = parse_property_tail(name);
        expect(Tok::Semi, "';'");
        m.properties.push_back(std::move(p));
    }

    std::string expect_fresh_name_soft(ModelAst& m) {
        if (!at(Tok::Ident)) fail("expected property name");
        std::string name = cur().text;
        for (const auto& p : m.properties)
            if (p.name == name) fail("duplicate property '" + name + "'");
        ++pos_;
        return name;
    }

    PropertyDecl parse_property_tail(std::string name) {
        PropertyDecl p;
        p.name = std::move(name);
        p.pos = cur().pos;
        switch (cur().kind) {
        case Tok::KwPmax: p.kind = PropertyKind::Probability; p.direction = Direction::Max; break;
        case Tok::KwPmin: p.kind = PropertyKind::Probability; p.direction = Direction::Min; break;
        case Tok::KwRmax: p.kind = PropertyKind::ExpectedReward; p.direction = Direction::Max; break;
        case Tok::KwRmin: p.kind = PropertyKind::ExpectedReward; p.direction = Direction::Min; break;
        default: fail("expected Pmax, Pmin, Rmax or Rmin");
        }
        ++pos_;
        expect(Tok::LParen, "'('");
        p.target = parse_expr();
        expect(Tok::RParen, "')'");
        return p;
    }

    void parse_partition_decl(ModelAst& m) {
        if (m.partition) fail("duplicate partition declaration");
        SourcePos p = cur().pos;
        ++pos_;
        PartitionDecl d;
        d.pos = p;
        d.expr = parse_expr();
        expect(Tok::KwBound, "'bound'");
        d.bound = fold_int("partition bound");
        expect(Tok::Semi, "';'");
        if (d.bound < 1) fail_at(p, "partition bound must be at least 1");
        m.partition = std::move(d);
    }

    // Constant folding for declaration positions: full expression syntax, but
    // only constants and literals may appear.
    Value fold_value(const char* what) {
        SourcePos p = cur().pos;
        ExprPtr e = parse_expr();
        try {
            return evaluate(*e, {});
        } catch (const EvalError&) {
            fail_at(p, std::string(what) + " must be a constant expression");
        }
    }

    int64_t fold_int(const char* what) {
        SourcePos p = cur().pos;
        Value v = fold_value(what);
        if (v.type != Type::Int) fail_at(p, std::string(what) + " must be an integer");
        return v.i;
    }

    // Precedence ladder: ?: | & comparisons additive multiplicative unary primary.
    ExprPtr parse_expr() { return parse_ite(); }

    ExprPtr parse_ite() {
        ExprPtr c = parse_or();
        if (!accept(Tok::Question)) return c;
        SourcePos p = cur().pos;
        ExprPtr t = parse_ite();
        expect(Tok::Colon, "':'");
        ExprPtr f = parse_ite();
        return Expr::make_ite(std::move(c), std::move(t), std::move(f), p);
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (at(Tok::Pipe)) {
            SourcePos p = cur().pos;
            ++pos_;
            e = Expr::make_binary(BinaryOp::Or, std::move(e), parse_and(), p);
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_cmp();
        while (at(Tok::Amp)) {
            SourcePos p = cur().pos;
            ++pos_;
            e = Expr::make_binary(BinaryOp::And, std::move(e), parse_cmp(), p);
        }
        return e;
    }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        BinaryOp op;
        switch (cur().kind) {
        case Tok::Eq: op = BinaryOp::Eq; break;
        case Tok::Ne: op = BinaryOp::Ne; break;
        case Tok::Lt: op = BinaryOp::Lt; break;
        case Tok::Le: op = BinaryOp::Le; break;
        case Tok::Gt: op = BinaryOp::Gt; break;
        case Tok::Ge: op = BinaryOp::Ge; break;
        default: return e;
        }
        SourcePos p = cur().pos;
        ++pos_;
        return Expr::make_binary(op, std::move(e), parse_add(), p);
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinaryOp op = at(Tok::Plus) ? BinaryOp::Add : BinaryOp::Sub;
            SourcePos p = cur().pos;
            ++pos_;
            e = Expr::make_binary(op, std::move(e), parse_mul(), p);
        }
        return e;
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            BinaryOp op = at(Tok::Star) ? BinaryOp::Mul : BinaryOp::Div;
            SourcePos p = cur().pos;
            ++pos_;
            e = Expr::make_binary(op, std::move(e), parse_unary(), p);
        }
        return e;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            SourcePos p = cur().pos;
            ++pos_;
            return Expr::make_unary(UnaryOp::Neg, parse_unary(), p);
        }
        if (at(Tok::Bang)) {
            SourcePos p = cur().pos;
            ++pos_;
            return Expr::make_unary(UnaryOp::Not, parse_unary(), p);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        SourcePos p = cur().pos;
        switch (cur().kind) {
        case Tok::IntLit: {
            int64_t v = cur().int_value;
            ++pos_;
            return Expr::make_literal(Value::of_int(v), p);
        }
        case Tok::RealLit: {
            double v = cur().real_value;
            ++pos_;
            return Expr::make_literal(Value::of_real(v), p);
        }
        case Tok::KwTrue:
            ++pos_;
            return Expr::make_literal(Value::of_bool(true), p);
        case Tok::KwFalse:
            ++pos_;
            return Expr::make_literal(Value::of_bool(false), p);
        case Tok::LParen: {
            ++pos_;
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::KwMin:
        case Tok::KwMax: {
            BinaryOp op = at(Tok::KwMin) ? BinaryOp::Min : BinaryOp::Max;
            ++pos_;
            expect(Tok::LParen, "'('");
            ExprPtr e = parse_expr();
            do {
                expect(Tok::Comma, "','");
                e = Expr::make_binary(op, std::move(e), parse_expr(), p);
            } while (at(Tok::Comma));
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Ident: {
            std::string name = cur().text;
            auto c = consts_.find(name);
            if (c != consts_.end()) {
                ++pos_;
                return Expr::make_literal(c->second, p);
            }
            if (!var_names_.count(name)) fail("unknown identifier '" + name + "'");
            ++pos_;
            return Expr::make_var(std::move(name), p);
        }
        default:
            fail("expected expression");
        }
    }
};

bool alternative_equal(const Alternative& a, const Alternative& b) {
    auto opt_equal = [](const ExprPtr& x, const ExprPtr& y) {
        if (!x || !y) return !x && !y;
        return expr_equal(*x, *y);
    };
    if (!opt_equal(a.probability, b.probability) || !opt_equal(a.reward, b.reward)) return false;
    if (a.updates.size() != b.updates.size()) return false;
    for (size_t k = 0; k < a.updates.size(); ++k) {
        if (a.updates[k].var != b.updates[k].var) return false;
        if (!expr_equal(*a.updates[k].value, *b.updates[k].value)) return false;
    }
    return true;
}

} // namespace

bool model_equal(const ModelAst& a, const ModelAst& b) {
    if (a.constants.size() != b.constants.size() || a.variables.size() != b.variables.size() ||
        a.commands.size() != b.commands.size() || a.properties.size() != b.properties.size())
        return false;
    for (size_t k = 0; k < a.constants.size(); ++k) {
        if (a.constants[k].name != b.constants[k].name) return false;
        if (!(a.constants[k].value == b.constants[k].value)) return false;
    }
    for (size_t k = 0; k < a.variables.size(); ++k) {
        const auto& x = a.variables[k];
        const auto& y = b.variables[k];
        if (x.name != y.name || x.lower != y.lower || x.upper != y.upper || x.init != y.init)
            return false;
    }
    for (size_t k = 0; k < a.commands.size(); ++k) {
        if (!expr_equal(*a.commands[k].guard, *b.commands[k].guard)) return false;
        if (a.commands[k].alternatives.size() != b.commands[k].alternatives.size()) return false;
        for (size_t j = 0; j < a.commands[k].alternatives.size(); ++j)
            if (!alternative_equal(a.commands[k].alternatives[j], b.commands[k].alternatives[j]))
                return false;
    }
    for (size_t k = 0; k < a.properties.size(); ++k) {
        const auto& x = a.properties[k];
        const auto& y = b.properties[k];
        if (x.name != y.name || x.kind != y.kind || x.direction != y.direction) return false;
        if (!expr_equal(*x.target, *y.target)) return false;
    }
    if (a.partition.has_value() != b.partition.has_value()) return false;
    if (a.partition) {
        if (a.partition->bound != b.partition->bound) return false;
        if (!expr_equal(*a.partition->expr, *b.partition->expr)) return false;
    }
    return true;
}

// Reward expressions sit at multiplicative precedence in the grammar; looser
// top-level operators must be printed parenthesized to survive a reparse.
static bool reward_needs_parens(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Literal:
    case ExprKind::Var:
    case ExprKind::Unary:
        return false;
    case ExprKind::Binary:
        switch (e.bop) {
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Min:
        case BinaryOp::Max:
            return false;
        default:
            return true;
        }
    default:
        return true;
    }
}

std::string print_model(const ModelAst& m) {
    std::string out;
    for (const auto& c : m.constants) {
        out += "const " + c.name + " = ";
        out += to_string(*Expr::make_literal(c.value));
        out += ";\n";
    }
    for (const auto& v : m.variables) {
        out += "var " + v.name + " : " + std::to_string(v.lower) + ".." +
               std::to_string(v.upper) + " init " + std::to_string(v.init) + ";\n";
    }
    for (const auto& c : m.commands) {
        out += "[] " + to_string(*c.guard) + " ->";
        bool first = true;
        for (const auto& alt : c.alternatives) {
            out += first ? " " : " + ";
            first = false;
            if (alt.probability) out += to_string(*alt.probability) + " : ";
            if (alt.updates.empty()) {
                out += "true";
            } else {
                bool u0 = true;
                for (const auto& u : alt.updates) {
                    if (!u0) out += " & ";
                    u0 = false;
                    out += "(" + u.var + "' = " + to_string(*u.value) + ")";
                }
            }
            if (alt.reward) {
                out += " reward ";
                if (reward_needs_parens(*alt.reward))
                    out += "(" + to_string(*alt.reward) + ")";
                else
                    out += to_string(*alt.reward);
            }
        }
        out += ";\n";
    }
    for (const auto& p : m.properties) {
        const char* op = p.kind == PropertyKind::Probability
                             ? (p.direction == Direction::Max ? "Pmax" : "Pmin")
                             : (p.direction == Direction::Max ? "Rmax" : "Rmin");
        out += "property " + p.name + " = " + op + "(" + to_string(*p.target) + ");\n";
    }
    if (m.partition) {
        out += "partition " + to_string(*m.partition->expr) + " bound " +
               std::to_string(m.partition->bound) + ";\n";
    }
    return out;
}

ParseResult parse_model(std::string_view text) {
    ParseResult r;
    Parser p(text, r.errors);
    ModelAst m = p.parse_model_body();
    if (r.errors.empty()) r.ast = std::move(m);
    return r;
}

PropertyFragmentResult parse_property_fragment(std::string_view text, const ModelAst& context) {
    PropertyFragmentResult r;
    Parser p(text, r.errors);
    p.seed_constants(context);
    try {
        PropertyDecl d = p.parse_property_body();
        if (r.errors.empty()) r.property = std::move(d);
    } catch (ParseAbort&) {
    }
    return r;
}

PartitionFragmentResult parse_partition_fragment(std::string_view text, const ModelAst& context) {
    PartitionFragmentResult r;
    Parser p(text, r.errors);
    p.seed_constants(context);
    try {
        PartitionDecl d = p.parse_partition_body();
        if (r.errors.empty()) r.partition = std::move(d);
    } catch (ParseAbort&) {
    }
    return r;
}

} // namespace diskmc
