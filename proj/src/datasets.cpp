#include "hsm/datasets.hpp"

namespace hsm {
namespace datasets {

static std::vector<char> pewee_mask() {
    Shape s({4, 4, 4});
    std::vector<char> mask(s.cell_count(), 0);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            for (int k = 1; k <= 4; ++k)
                if (i == j || j == k) mask[s.offset({i, j, k})] = 1;
    return mask;
}

Table wood_pewee() {
    Shape s({4, 4, 4});
    // rows (i,j), columns k; 0 in masked positions
    static const Count rows[16][4] = {
        {0, 0, 0, 0},    // (1,1)
        {19, 0, 2, 2},   // (1,2)
        {2, 26, 0, 0},   // (1,3)
        {12, 5, 0, 0},   // (1,4)
        {0, 9, 6, 12},   // (2,1)
        {0, 0, 0, 0},    // (2,2)
        {24, 1, 0, 1},   // (2,3)
        {1, 2, 0, 0},    // (2,4)
        {0, 4, 22, 0},   // (3,1)
        {3, 0, 22, 0},   // (3,2)
        {0, 0, 0, 0},    // (3,3)
        {1, 0, 0, 0},    // (3,4)
        {0, 11, 0, 4},   // (4,1)
        {5, 0, 1, 1},    // (4,2)
        {0, 0, 0, 0},    // (4,3)
        {0, 0, 0, 0},    // (4,4)
    };
    std::vector<Count> counts(s.cell_count());
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            for (int k = 1; k <= 4; ++k)
                counts[s.offset({i, j, k})] = rows[(i - 1) * 4 + (j - 1)][k - 1];
    return Table(s, std::move(counts), pewee_mask());
}

Subspace pewee_model1() {
    Shape s({4, 4, 4});
    return Subspace::hierarchical(
        s, Complex(3, std::vector<std::vector<int>>{{1, 2}, {2, 3}}), pewee_mask());
}

Subspace pewee_model2() {
    Shape s({4, 4, 4});
    // alpha_i + beta_j + gamma_k (+ diagonal terms, which vanish on support)
    return Subspace::main_effects(s, pewee_mask());
}

Table wam() {
    Shape s({2, 2, 2, 2, 2, 2});
    // rows (plans, pref, agree), columns (school, sex, attendance)
    static const Count rows[8][8] = {
        {37, 27, 51, 48, 51, 55, 109, 86},
        {16, 11, 10, 19, 24, 28, 21, 25},
        {16, 15, 7, 6, 32, 34, 30, 31},
        {12, 24, 13, 7, 55, 39, 26, 19},
        {10, 8, 12, 15, 2, 1, 9, 5},
        {9, 4, 8, 9, 8, 9, 4, 5},
        {7, 10, 7, 3, 5, 2, 1, 3},
        {8, 4, 6, 4, 10, 9, 3, 6},
    };
    std::vector<Count> counts(s.cell_count());
    for (int plans = 1; plans <= 2; ++plans)
        for (int pref = 1; pref <= 2; ++pref)
            for (int agree = 1; agree <= 2; ++agree)
                for (int school = 1; school <= 2; ++school)
                    for (int sex = 1; sex <= 2; ++sex)
                        for (int att = 1; att <= 2; ++att) {
                            int r = (plans - 1) * 4 + (pref - 1) * 2 + (agree - 1);
                            int c = (school - 1) * 4 + (sex - 1) * 2 + (att - 1);
                            counts[s.offset({att, sex, school, agree, pref, plans})] = rows[r][c];
                        }
    return Table(s, std::move(counts));
}

Subspace wam_model1() {
    Shape s({2, 2, 2, 2, 2, 2});
    return Subspace::hierarchical(
        s, Complex(6, std::vector<std::vector<int>>{{1, 2, 3, 5}, {2, 3, 4, 5}, {3, 4, 5, 6}}));
}

Subspace wam_model2() {
    Shape s({2, 2, 2, 2, 2, 2});
    SplitSpec spec{
        Complex(6, std::vector<std::vector<int>>{{1, 2, 3, 5}, {2, 3, 4, 5}, {3, 4, 5, 6}}),
        {{VertexSet::of({2, 3, 4, 5}), VertexSet::of({3})}},
        {{{VertexSet::of({2, 3, 4, 5}), Cell{1}},
          {VertexSet::of({2, 5}), VertexSet::of({4, 5})}},
         {{VertexSet::of({2, 3, 4, 5}), Cell{2}}, {VertexSet::of({2, 4, 5})}}}};
    return split_model(s, spec);
}

}  // namespace datasets
}  // namespace hsm
