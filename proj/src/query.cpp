#include "lpq/query.hpp"

#include <fstream>
#include <sstream>

namespace lpq {

const char* to_string(Connective c) { return c == Connective::And ? "and" : "or"; }

void Catalog::add(ColumnTable table) {
    std::string name = table.name();
    tables_.insert_or_assign(std::move(name), std::move(table));
}

const ColumnTable& Catalog::get(const std::string& name) const {
    auto it = tables_.find(name);
    if (it == tables_.end())
        raise(ErrorKind::Schema, "unknown table " + name);
    return it->second;
}

ExprPtr SubqueryQuery::compound_pred() const {
    return Expr::logic(connective == Connective::And ? LogicOp::And : LogicOp::Or, nc_pred,
                       c_pred);
}

bool SubqueryQuery::has_xparam() const {
    return probe->has_xparam() || inner_value->has_xparam() || nc_pred->has_xparam() ||
           c_pred->has_xparam();
}

int classify(const SubqueryQuery& q) {
    if (q.nc_pred->correlated())
        raise(ErrorKind::Planning, "nc predicate must not contain correlation parameters");
    if (!q.c_pred->correlated())
        raise(ErrorKind::Planning, "c predicate must contain a correlation parameter");
    if (q.probe->correlated())
        raise(ErrorKind::Planning, "probe expression must not contain correlation parameters");
    bool isAnd = q.connective == Connective::And;
    switch (q.set_op) {
        case SetPredicateOp::In: return isAnd ? 1 : 2;
        case SetPredicateOp::LtSome: return isAnd ? 3 : 4;
        default:
            raise(ErrorKind::Planning,
                  std::string("set predicate ") + to_string(q.set_op) +
                      " is not supported by the planner");
    }
}

void validate_query(const SubqueryQuery& q, const Catalog& catalog) {
    classify(q);
    if (q.has_xparam())
        raise(ErrorKind::Planning, "query still contains (xparam); substitute a value first");
    const ColumnTable& outer = catalog.get(q.outer_table);
    const ColumnTable& inner = catalog.get(q.inner_table);
    if (q.output_columns.empty())
        raise(ErrorKind::Planning, "query has no output columns");
    for (const auto& c : q.output_columns) outer.column(c);

    ExprType probeT = type_check(*q.probe, outer, nullptr);
    ExprType valueT = type_check(*q.inner_value, inner, &outer);
    if (probeT == ExprType::Bool || valueT == ExprType::Bool)
        raise(ErrorKind::Type, "probe and inner value must be scalar expressions");
    if (probeT != valueT)
        raise(ErrorKind::Type, std::string("probe type ") + to_string(probeT) +
                                   " does not match inner value type " + to_string(valueT));
    if (type_check(*q.nc_pred, inner, &outer) != ExprType::Bool)
        raise(ErrorKind::Type, "nc predicate must be boolean");
    if (type_check(*q.c_pred, inner, &outer) != ExprType::Bool)
        raise(ErrorKind::Type, "c predicate must be boolean");
}

SubqueryQuery substitute_x(const SubqueryQuery& q, int64_t x) {
    SubqueryQuery out = q;
    out.probe = substitute_x(q.probe, x);
    out.inner_value = substitute_x(q.inner_value, x);
    out.nc_pred = substitute_x(q.nc_pred, x);
    out.c_pred = substitute_x(q.c_pred, x);
    return out;
}

RewrittenQuery rewrite(const SubqueryQuery& q) {
    classify(q);
    if (q.connective == Connective::And) {
        // OP nc  AND  OP (nc AND c): nc is kept inside the combined
        // branch, otherwise the two branches could pass via different
        // witness rows.
        return AndForm{
            SubqueryBranch{q.inner_table, q.inner_value, q.nc_pred},
            SubqueryBranch{q.inner_table, q.inner_value,
                           Expr::logic(LogicOp::And, q.nc_pred, q.c_pred)},
        };
    }
    return OrForm{
        SubqueryBranch{q.inner_table, q.inner_value, q.nc_pred},
        SubqueryBranch{q.inner_table, q.inner_value, q.c_pred},
    };
}

// ----------------------------------------------------------- text format

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

SubqueryQuery parse_query_text(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream is{std::string(text)};
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        lineno++;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto colon = t.find(':');
        if (colon == std::string::npos)
            raise(ErrorKind::Planning,
                  "query line " + std::to_string(lineno) + ": expected 'key: value'");
        std::string key = trim(t.substr(0, colon));
        std::string value = trim(t.substr(colon + 1));
        if (kv.count(key))
            raise(ErrorKind::Planning,
                  "query line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    static const char* known[] = {"outer_table", "output_columns", "probe", "set_op",
                                  "inner_table", "inner_value",    "nc_pred", "c_pred",
                                  "connective"};
    for (const auto& [k, _] : kv) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) raise(ErrorKind::Planning, "query document: unknown key '" + k + "'");
    }
    auto need = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end())
            raise(ErrorKind::Planning, "query document: missing key '" + k + "'");
        return it->second;
    };

    SubqueryQuery q;
    q.outer_table = need("outer_table");
    q.output_columns = split_list(need("output_columns"));
    q.probe = parse_expr(need("probe"));
    q.set_op = set_predicate_op_from_string(need("set_op"));
    q.inner_table = need("inner_table");
    q.inner_value = parse_expr(need("inner_value"));
    q.nc_pred = parse_expr(need("nc_pred"));
    q.c_pred = parse_expr(need("c_pred"));
    const std::string& conn = need("connective");
    if (conn == "and") q.connective = Connective::And;
    else if (conn == "or") q.connective = Connective::Or;
    else raise(ErrorKind::Planning, "query document: connective must be 'and' or 'or'");
    return q;
}

SubqueryQuery load_query_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        raise(ErrorKind::Data, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_query_text(buf.str());
}

std::string query_to_text(const SubqueryQuery& q) {
    std::ostringstream os;
    os << "outer_table: " << q.outer_table << "\n";
    os << "output_columns: ";
    for (size_t i = 0; i < q.output_columns.size(); ++i)
        os << (i ? ", " : "") << q.output_columns[i];
    os << "\n";
    os << "probe: " << print_expr(*q.probe) << "\n";
    os << "set_op: " << to_string(q.set_op) << "\n";
    os << "inner_table: " << q.inner_table << "\n";
    os << "inner_value: " << print_expr(*q.inner_value) << "\n";
    os << "nc_pred: " << print_expr(*q.nc_pred) << "\n";
    os << "c_pred: " << print_expr(*q.c_pred) << "\n";
    os << "connective: " << to_string(q.connective) << "\n";
    return os.str();
}

}  // namespace lpq
