#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bigerm/normalform.hpp"

namespace bigerm {

struct TableOptions {
    std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
    std::uint64_t seed = 1;
    int samples = 25;       // sampling budget per table row
    int max_odd_exp = 9;    // j ranges over odd values up to this bound
};

struct TableRow {
    std::pair<int, int> pair;
    std::vector<std::string> families;  // rendered normal-form families
};

std::vector<TableRow> generate_table(const TableOptions& opts);

std::string table_markdown(const std::vector<TableRow>& rows);

}  // namespace bigerm
