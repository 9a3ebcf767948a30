#include "lpq/expr.hpp"

#include <cctype>
#include <charconv>

namespace lpq {

const char* to_string(ExprType t) {
    switch (t) {
        case ExprType::Int64: return "int64";
        case ExprType::Float64: return "float64";
        case ExprType::Text: return "text";
        case ExprType::Bool: return "bool";
    }
    return "?";
}

std::string Expr::CorrParam::column() const {
    auto dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(dot + 1);
}

namespace {

bool child_correlated(const ExprPtr& e) { return e && e->correlated(); }
bool child_has_x(const ExprPtr& e) { return e && e->has_xparam(); }

}  // namespace

Expr::Expr(Node node) : node_(std::move(node)) {
    std::visit(
        [this](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CorrParam>) {
                correlated_ = true;
            } else if constexpr (std::is_same_v<T, XParam>) {
                has_xparam_ = true;
            } else if constexpr (std::is_same_v<T, Arith> || std::is_same_v<T, Cmp> ||
                                 std::is_same_v<T, Logic>) {
                correlated_ = child_correlated(n.lhs) || child_correlated(n.rhs);
                has_xparam_ = child_has_x(n.lhs) || child_has_x(n.rhs);
            } else if constexpr (std::is_same_v<T, Not>) {
                correlated_ = child_correlated(n.child);
                has_xparam_ = child_has_x(n.child);
            }
        },
        node_);
}

ExprPtr Expr::col(std::string name) { return std::make_shared<Expr>(ColumnRef{std::move(name)}); }
ExprPtr Expr::lit(Scalar v) { return std::make_shared<Expr>(Literal{std::move(v)}); }
ExprPtr Expr::corr(std::string name) { return std::make_shared<Expr>(CorrParam{std::move(name)}); }
ExprPtr Expr::xparam() { return std::make_shared<Expr>(XParam{}); }
ExprPtr Expr::arith(ArithOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Arith{op, std::move(l), std::move(r)});
}
ExprPtr Expr::cmp(CmpOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Cmp{op, std::move(l), std::move(r)});
}
ExprPtr Expr::logic(LogicOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Logic{op, std::move(l), std::move(r)});
}
ExprPtr Expr::negate(ExprPtr c) { return std::make_shared<Expr>(Not{std::move(c)}); }

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
    std::string_view text;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        raise(ErrorKind::Planning,
              "expression parse error at offset " + std::to_string(pos) + ": " + msg);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
    }

    char peek() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        return text[pos];
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        pos++;
    }

    std::string token() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            pos++;
        if (pos == start) fail("expected a token");
        return std::string(text.substr(start, pos - start));
    }

    std::string quoted_text() {
        pos++;  // opening quote
        std::string out;
        while (pos < text.size() && text[pos] != '"') {
            if (text[pos] == '\\' && pos + 1 < text.size()) pos++;
            out += text[pos++];
        }
        if (pos >= text.size()) fail("unterminated text literal");
        pos++;  // closing quote
        return out;
    }

    Scalar literal() {
        skip_ws();
        if (pos < text.size() && text[pos] == '"') return Scalar::of_text(quoted_text());
        std::string tok = token();
        bool integral = !tok.empty();
        for (size_t i = (tok[0] == '-' || tok[0] == '+') ? 1 : 0; i < tok.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(tok[i]))) integral = false;
        if (integral && tok != "-" && tok != "+") {
            int64_t v = 0;
            auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (r.ec == std::errc() && r.ptr == tok.data() + tok.size())
                return Scalar::of_int(v);
        }
        double d = 0;
        auto r = std::from_chars(tok.data(), tok.data() + tok.size(), d);
        if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
            fail("bad literal: " + tok);
        return Scalar::of_float(d);
    }

    ExprPtr expr() {
        expect('(');
        std::string op = token();
        ExprPtr result;
        if (op == "col") {
            result = Expr::col(token());
        } else if (op == "corr") {
            result = Expr::corr(token());
        } else if (op == "xparam") {
            result = Expr::xparam();
        } else if (op == "lit") {
            result = Expr::lit(literal());
        } else if (op == "not") {
            result = Expr::negate(expr());
        } else if (op == "and" || op == "or") {
            auto l = expr();
            auto r = expr();
            result = Expr::logic(op == "and" ? LogicOp::And : LogicOp::Or, l, r);
        } else if (op == "+" || op == "-" || op == "*") {
            auto l = expr();
            auto r = expr();
            ArithOp a = op == "+" ? ArithOp::Add : op == "-" ? ArithOp::Sub : ArithOp::Mul;
            result = Expr::arith(a, l, r);
        } else {
            CmpOp c;
            if (op == "<") c = CmpOp::Lt;
            else if (op == "<=") c = CmpOp::Le;
            else if (op == "=") c = CmpOp::Eq;
            else if (op == "!=") c = CmpOp::Ne;
            else if (op == ">=") c = CmpOp::Ge;
            else if (op == ">") c = CmpOp::Gt;
            else fail("unknown operator: " + op);
            auto l = expr();
            auto r = expr();
            result = Expr::cmp(c, l, r);
        }
        expect(')');
        return result;
    }
};

const char* cmp_name(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
    }
    return "?";
}

const char* arith_name(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
    }
    return "?";
}

std::string literal_text(const Scalar& v) {
    switch (v.type()) {
        case ScalarType::Int64: return v.to_display();
        case ScalarType::Float64: {
            std::string s = v.to_display();
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
                s += ".0";
            return s;
        }
        case ScalarType::Text: {
            std::string out = "\"";
            for (char c : v.as_text()) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            out += '"';
            return out;
        }
    }
    return {};
}

}  // namespace

ExprPtr parse_expr(std::string_view text) {
    Parser p{text};
    ExprPtr e = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input after expression");
    return e;
}

std::string print_expr(const Expr& e) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return "(col " + n.name + ")";
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return "(lit " + literal_text(n.value) + ")";
            } else if constexpr (std::is_same_v<T, Expr::CorrParam>) {
                return "(corr " + n.name + ")";
            } else if constexpr (std::is_same_v<T, Expr::XParam>) {
                return "(xparam)";
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                return std::string("(") + arith_name(n.op) + " " + print_expr(*n.lhs) + " " +
                       print_expr(*n.rhs) + ")";
            } else if constexpr (std::is_same_v<T, Expr::Cmp>) {
                return std::string("(") + cmp_name(n.op) + " " + print_expr(*n.lhs) + " " +
                       print_expr(*n.rhs) + ")";
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                return std::string("(") + (n.op == LogicOp::And ? "and" : "or") + " " +
                       print_expr(*n.lhs) + " " + print_expr(*n.rhs) + ")";
            } else {
                return "(not " + print_expr(*n.child) + ")";
            }
        },
        e.node());
}

ExprPtr substitute_x(const ExprPtr& e, int64_t x) {
    if (!e->has_xparam()) return e;
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::XParam>) {
                return Expr::lit_int(x);
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                return Expr::arith(n.op, substitute_x(n.lhs, x), substitute_x(n.rhs, x));
            } else if constexpr (std::is_same_v<T, Expr::Cmp>) {
                return Expr::cmp(n.op, substitute_x(n.lhs, x), substitute_x(n.rhs, x));
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                return Expr::logic(n.op, substitute_x(n.lhs, x), substitute_x(n.rhs, x));
            } else if constexpr (std::is_same_v<T, Expr::Not>) {
                return Expr::negate(substitute_x(n.child, x));
            } else {
                return e;
            }
        },
        e->node());
}

namespace {

void collect_params(const Expr& e, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::CorrParam>) {
                for (const auto& s : out)
                    if (s == n.name) return;
                out.push_back(n.name);
            } else if constexpr (std::is_same_v<T, Expr::Arith> || std::is_same_v<T, Expr::Cmp> ||
                                 std::is_same_v<T, Expr::Logic>) {
                collect_params(*n.lhs, out);
                collect_params(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, Expr::Not>) {
                collect_params(*n.child, out);
            }
        },
        e.node());
}

}  // namespace

std::vector<std::string> collect_corr_params(const Expr& e) {
    std::vector<std::string> out;
    collect_params(e, out);
    return out;
}

ExprType type_check(const Expr& e, const ColumnTable& table, const ColumnTable* outer) {
    return std::visit(
        [&](const auto& n) -> ExprType {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return expr_type_of(table.column(n.name).type());
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return expr_type_of(n.value.type());
            } else if constexpr (std::is_same_v<T, Expr::CorrParam>) {
                if (!outer)
                    raise(ErrorKind::Planning,
                          "correlation parameter " + n.name + " used without binding context");
                return expr_type_of(outer->column(n.column()).type());
            } else if constexpr (std::is_same_v<T, Expr::XParam>) {
                raise(ErrorKind::Planning, "x parameter must be substituted before execution");
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                ExprType l = type_check(*n.lhs, table, outer);
                ExprType r = type_check(*n.rhs, table, outer);
                if (l != r || (l != ExprType::Int64 && l != ExprType::Float64))
                    raise(ErrorKind::Type, std::string("arithmetic needs matching numeric "
                                                       "operands, got ") +
                                               to_string(l) + " and " + to_string(r));
                return l;
            } else if constexpr (std::is_same_v<T, Expr::Cmp>) {
                ExprType l = type_check(*n.lhs, table, outer);
                ExprType r = type_check(*n.rhs, table, outer);
                if (l != r || l == ExprType::Bool)
                    raise(ErrorKind::Type, std::string("comparison needs matching scalar "
                                                       "operands, got ") +
                                               to_string(l) + " and " + to_string(r));
                return ExprType::Bool;
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                if (type_check(*n.lhs, table, outer) != ExprType::Bool ||
                    type_check(*n.rhs, table, outer) != ExprType::Bool)
                    raise(ErrorKind::Type, "logical operands must be boolean");
                return ExprType::Bool;
            } else {
                if (type_check(*n.child, table, outer) != ExprType::Bool)
                    raise(ErrorKind::Type, "not operand must be boolean");
                return ExprType::Bool;
            }
        },
        e.node());
}

// --------------------------------------------------------------- binding

void Binding::set(const std::string& param, Scalar v) {
    for (auto& [name, val] : entries_) {
        if (name == param) {
            val = std::move(v);
            return;
        }
    }
    entries_.emplace_back(param, std::move(v));
}

const Scalar& Binding::get(const std::string& param) const {
    for (const auto& [name, val] : entries_)
        if (name == param) return val;
    raise(ErrorKind::Execution, "unbound correlation parameter " + param);
}

std::string Binding::key() const {
    std::string k;
    for (const auto& [name, val] : entries_) {
        k += name;
        k += '=';
        k += std::to_string(static_cast<int>(val.type()));
        k += ':';
        k += val.to_display();
        k += '\x1f';
    }
    return k;
}

// ------------------------------------------------------------ evaluation

size_t VecValues::size() const {
    switch (type) {
        case ExprType::Int64: return i64.size();
        case ExprType::Float64: return f64.size();
        case ExprType::Text: return text.size();
        case ExprType::Bool: return bools.size();
    }
    return 0;
}

Scalar VecValues::scalar_at(size_t i) const {
    switch (type) {
        case ExprType::Int64: return Scalar::of_int(i64[i]);
        case ExprType::Float64: return Scalar::of_float(f64[i]);
        case ExprType::Text: return Scalar::of_text(text[i]);
        case ExprType::Bool: return Scalar::of_int(bools[i] ? 1 : 0);
    }
    raise(ErrorKind::Invariant, "bad vector tag");
}

namespace {

VecValues splat(const Scalar& v, size_t n) {
    VecValues out;
    switch (v.type()) {
        case ScalarType::Int64:
            out.type = ExprType::Int64;
            out.i64.assign(n, v.as_int());
            break;
        case ScalarType::Float64:
            out.type = ExprType::Float64;
            out.f64.assign(n, v.as_float());
            break;
        case ScalarType::Text:
            out.type = ExprType::Text;
            out.text.assign(n, v.as_text());
            break;
    }
    return out;
}

template <typename T, typename F>
void zip(const std::vector<T>& a, const std::vector<T>& b, std::vector<uint8_t>& out, F f) {
    out.resize(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]) ? 1 : 0;
}

template <typename F>
VecValues apply_cmp(const VecValues& l, const VecValues& r, F f) {
    VecValues out;
    out.type = ExprType::Bool;
    switch (l.type) {
        case ExprType::Int64:
            zip(l.i64, r.i64, out.bools, [&](int64_t x, int64_t y) { return f(x <=> y); });
            break;
        case ExprType::Float64:
            zip(l.f64, r.f64, out.bools,
                [&](double x, double y) { return f(x <=> y); });
            break;
        case ExprType::Text:
            zip(l.text, r.text, out.bools, [&](const std::string& x, const std::string& y) {
                return f(x.compare(y) <=> 0);
            });
            break;
        default:
            raise(ErrorKind::Type, "comparison over boolean operands");
    }
    return out;
}

template <typename T, typename F>
std::vector<T> zip_arith(const std::vector<T>& a, const std::vector<T>& b, F f) {
    std::vector<T> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
    return out;
}

VecValues apply_arith(ArithOp op, const VecValues& l, const VecValues& r) {
    VecValues out;
    out.type = l.type;
    auto combine = [&](auto f) {
        if (l.type == ExprType::Int64)
            out.i64 = zip_arith(l.i64, r.i64, f);
        else
            out.f64 = zip_arith(l.f64, r.f64, f);
    };
    switch (op) {
        case ArithOp::Add: combine([](auto x, auto y) { return x + y; }); break;
        case ArithOp::Sub: combine([](auto x, auto y) { return x - y; }); break;
        case ArithOp::Mul: combine([](auto x, auto y) { return x * y; }); break;
    }
    return out;
}

bool cmp_holds(CmpOp op, int c) {
    switch (op) {
        case CmpOp::Lt: return c < 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Eq: return c == 0;
        case CmpOp::Ne: return c != 0;
        case CmpOp::Ge: return c >= 0;
        case CmpOp::Gt: return c > 0;
    }
    return false;
}

}  // namespace

VecValues eval_block(const Expr& e, const PositionBlock& block, const Binding* binding) {
    return std::visit(
        [&](const auto& n) -> VecValues {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                Reader reader(*block.table, n.name);
                VecValues out;
                out.type = expr_type_of(reader.column().type());
                switch (out.type) {
                    case ExprType::Int64: reader.gather(block, out.i64); break;
                    case ExprType::Float64: reader.gather(block, out.f64); break;
                    default: reader.gather(block, out.text); break;
                }
                return out;
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return splat(n.value, block.size());
            } else if constexpr (std::is_same_v<T, Expr::CorrParam>) {
                if (!binding)
                    raise(ErrorKind::Execution, "unbound correlation parameter " + n.name);
                return splat(binding->get(n.name), block.size());
            } else if constexpr (std::is_same_v<T, Expr::XParam>) {
                raise(ErrorKind::Planning, "x parameter must be substituted before execution");
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                VecValues l = eval_block(*n.lhs, block, binding);
                VecValues r = eval_block(*n.rhs, block, binding);
                if (l.type != r.type) raise(ErrorKind::Type, "arithmetic operand type mismatch");
                return apply_arith(n.op, l, r);
            } else if constexpr (std::is_same_v<T, Expr::Cmp>) {
                VecValues l = eval_block(*n.lhs, block, binding);
                VecValues r = eval_block(*n.rhs, block, binding);
                if (l.type != r.type) raise(ErrorKind::Type, "comparison operand type mismatch");
                CmpOp op = n.op;
                return apply_cmp(l, r, [op](std::partial_ordering c) {
                    int v = c < 0 ? -1 : c > 0 ? 1 : 0;
                    return cmp_holds(op, v);
                });
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                VecValues l = eval_block(*n.lhs, block, binding);
                VecValues r = eval_block(*n.rhs, block, binding);
                VecValues out;
                out.type = ExprType::Bool;
                out.bools.resize(l.bools.size());
                if (n.op == LogicOp::And)
                    for (size_t i = 0; i < out.bools.size(); ++i)
                        out.bools[i] = l.bools[i] && r.bools[i];
                else
                    for (size_t i = 0; i < out.bools.size(); ++i)
                        out.bools[i] = l.bools[i] || r.bools[i];
                return out;
            } else {
                VecValues c = eval_block(*n.child, block, binding);
                for (auto& b : c.bools) b = !b;
                return c;
            }
        },
        e.node());
}

Scalar eval_row(const Expr& e, const ColumnTable& table, RowPos row, const Binding* binding) {
    return std::visit(
        [&](const auto& n) -> Scalar {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return table.column(n.name).at(row);
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Expr::CorrParam>) {
                if (!binding)
                    raise(ErrorKind::Execution, "unbound correlation parameter " + n.name);
                return binding->get(n.name);
            } else if constexpr (std::is_same_v<T, Expr::XParam>) {
                raise(ErrorKind::Planning, "x parameter must be substituted before execution");
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                Scalar l = eval_row(*n.lhs, table, row, binding);
                Scalar r = eval_row(*n.rhs, table, row, binding);
                if (l.type() != r.type())
                    raise(ErrorKind::Type, "arithmetic operand type mismatch");
                if (l.type() == ScalarType::Int64) {
                    int64_t x = l.as_int(), y = r.as_int();
                    switch (n.op) {
                        case ArithOp::Add: return Scalar::of_int(x + y);
                        case ArithOp::Sub: return Scalar::of_int(x - y);
                        case ArithOp::Mul: return Scalar::of_int(x * y);
                    }
                }
                double x = l.as_float(), y = r.as_float();
                switch (n.op) {
                    case ArithOp::Add: return Scalar::of_float(x + y);
                    case ArithOp::Sub: return Scalar::of_float(x - y);
                    case ArithOp::Mul: return Scalar::of_float(x * y);
                }
                raise(ErrorKind::Invariant, "bad arith op");
            } else if constexpr (std::is_same_v<T, Expr::Cmp>) {
                Scalar l = eval_row(*n.lhs, table, row, binding);
                Scalar r = eval_row(*n.rhs, table, row, binding);
                return Scalar::of_int(cmp_holds(n.op, compare(l, r)) ? 1 : 0);
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                bool l = eval_row_bool(*n.lhs, table, row, binding);
                if (n.op == LogicOp::And && !l) return Scalar::of_int(0);
                if (n.op == LogicOp::Or && l) return Scalar::of_int(1);
                return Scalar::of_int(eval_row_bool(*n.rhs, table, row, binding) ? 1 : 0);
            } else {
                return Scalar::of_int(eval_row_bool(*n.child, table, row, binding) ? 0 : 1);
            }
        },
        e.node());
}

bool eval_row_bool(const Expr& e, const ColumnTable& table, RowPos row, const Binding* binding) {
    return eval_row(e, table, row, binding).as_int() != 0;
}

double expression_cost(const Expr& e) {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Arith> || std::is_same_v<T, Expr::Cmp> ||
                          std::is_same_v<T, Expr::Logic>) {
                return 1.0 + expression_cost(*n.lhs) + expression_cost(*n.rhs);
            } else if constexpr (std::is_same_v<T, Expr::Not>) {
                return 1.0 + expression_cost(*n.child);
            } else {
                return 1.0;
            }
        },
        e.node());
}

}  // namespace lpq
