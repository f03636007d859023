#include "qel/graph.hpp"

#include <algorithm>

namespace qel {

// Tarjan SCC on a small adjacency-list digraph, iterative.
std::vector<std::vector<int>> scc_of_digraph(const std::vector<std::vector<int>>& adj) {
    const int n = int(adj.size());
    std::vector<int> num(n, -1), low(n, 0), sidx(n, -1);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;
    struct Frame {
        int v;
        size_t e;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (num[root] != -1) continue;
        num[root] = low[root] = counter++;
        sidx[root] = int(stack.size());
        stack.push_back(root);
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& fr = call.back();
            bool descended = false;
            while (fr.e < adj[fr.v].size()) {
                int w = adj[fr.v][fr.e++];
                if (num[w] == -1) {
                    num[w] = low[w] = counter++;
                    sidx[w] = int(stack.size());
                    stack.push_back(w);
                    call.push_back({w, 0});
                    descended = true;
                    break;
                } else if (sidx[w] != -1) {
                    low[fr.v] = std::min(low[fr.v], num[w]);
                }
            }
            if (descended) continue;
            int v = fr.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == num[v]) {
                std::vector<int> scc;
                int si = sidx[v];
                for (size_t i = si; i < stack.size(); ++i) {
                    scc.push_back(stack[i]);
                    sidx[stack[i]] = -1;
                }
                stack.resize(si);
                sccs.push_back(std::move(scc));
            }
        }
    }
    return sccs;
}


}  // namespace qel
