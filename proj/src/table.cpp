#include "lpq/table.hpp"

#include <algorithm>
#include <cmath>

namespace lpq {

Column::Column(std::string name, std::vector<double> values) : name_(std::move(name)) {
    for (double v : values)
        if (!std::isfinite(v))
            raise(ErrorKind::Type, "non-finite float64 in column " + name_);
    data_ = std::move(values);
}

size_t Column::size() const {
    return std::visit([](const auto& v) { return v.size(); }, data_);
}

Scalar Column::at(RowPos pos) const {
    switch (type()) {
        case ScalarType::Int64: return Scalar::of_int(ints()[pos]);
        case ScalarType::Float64: return Scalar::of_float(floats()[pos]);
        case ScalarType::Text: return Scalar::of_text(texts()[pos]);
    }
    raise(ErrorKind::Invariant, "bad column tag");
}

const std::vector<int64_t>& Column::ints() const {
    if (type() != ScalarType::Int64)
        raise(ErrorKind::Type, "column " + name_ + " is not int64");
    return std::get<std::vector<int64_t>>(data_);
}

const std::vector<double>& Column::floats() const {
    if (type() != ScalarType::Float64)
        raise(ErrorKind::Type, "column " + name_ + " is not float64");
    return std::get<std::vector<double>>(data_);
}

const std::vector<std::string>& Column::texts() const {
    if (type() != ScalarType::Text)
        raise(ErrorKind::Type, "column " + name_ + " is not text");
    return std::get<std::vector<std::string>>(data_);
}

ColumnTable::ColumnTable(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), cols_(std::move(columns)) {
    rows_ = cols_.empty() ? 0 : cols_.front().size();
    for (const auto& c : cols_) {
        if (c.size() != rows_)
            raise(ErrorKind::Schema, "column " + c.name() + " of table " + name_ +
                                         " has mismatched length");
        size_t same = 0;
        for (const auto& other : cols_)
            if (other.name() == c.name()) same++;
        if (same != 1)
            raise(ErrorKind::Schema, "duplicate column name " + c.name() + " in table " + name_);
    }
}

const Column* ColumnTable::find_column(std::string_view col) const {
    for (const auto& c : cols_)
        if (c.name() == col) return &c;
    return nullptr;
}

const Column& ColumnTable::column(std::string_view col) const {
    const Column* c = find_column(col);
    if (!c)
        raise(ErrorKind::Schema,
              "unknown column " + std::string(col) + " in table " + name_);
    return *c;
}

void check_ascending(std::span<const RowPos> positions, const char* who) {
    for (size_t i = 1; i < positions.size(); ++i)
        if (positions[i] <= positions[i - 1])
            raise(ErrorKind::Invariant,
                  std::string(who) + ": positions not strictly ascending");
}

std::vector<PositionBlock> block_slice(const ColumnTable& table,
                                       std::span<const RowPos> positions,
                                       size_t capacity) {
    if (capacity < 1)
        raise(ErrorKind::Usage, "block capacity must be at least 1");
    check_ascending(positions, "block_slice");
    std::vector<PositionBlock> out;
    for (size_t i = 0; i < positions.size(); i += capacity) {
        size_t n = std::min(capacity, positions.size() - i);
        out.push_back(PositionBlock{
            &table, std::vector<RowPos>(positions.begin() + i, positions.begin() + i + n)});
    }
    return out;
}

Reader::Reader(const ColumnTable& table, std::string_view column)
    : table_(&table), col_(&table.column(column)) {}

void Reader::check_block(const PositionBlock& block) const {
    if (block.table != table_)
        raise(ErrorKind::Schema, "reader for table " + table_->name() +
                                     " got a block of another table");
    if (!block.positions.empty() && block.positions.back() >= table_->row_count())
        raise(ErrorKind::Invariant, "position out of range in table " + table_->name());
}

std::vector<Scalar> Reader::read(const PositionBlock& block) const {
    check_block(block);
    std::vector<Scalar> out;
    out.reserve(block.size());
    for (RowPos p : block.positions) out.push_back(col_->at(p));
    return out;
}

void Reader::gather(const PositionBlock& block, std::vector<int64_t>& out) const {
    check_block(block);
    const auto& v = col_->ints();
    out.resize(block.size());
    for (size_t i = 0; i < block.size(); ++i) out[i] = v[block.positions[i]];
}

void Reader::gather(const PositionBlock& block, std::vector<double>& out) const {
    check_block(block);
    const auto& v = col_->floats();
    out.resize(block.size());
    for (size_t i = 0; i < block.size(); ++i) out[i] = v[block.positions[i]];
}

void Reader::gather(const PositionBlock& block, std::vector<std::string>& out) const {
    check_block(block);
    const auto& v = col_->texts();
    out.resize(block.size());
    for (size_t i = 0; i < block.size(); ++i) out[i] = v[block.positions[i]];
}

}  // namespace lpq
