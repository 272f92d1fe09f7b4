// Minimal library use: read a cap, unfold it with its base, print the result.

#include <cstdio>

#include "capunfold/capunfold.hpp"

int main(int argc, char** argv) {
    const char* path = argc > 1 ? argv[1] : "samples/pyramid.off";
    try {
        const capunfold::Cap cap = capunfold::read_off(path);
        const auto net = capunfold::unfold_polyhedron(cap, 3.0 * capunfold::pi / 180.0);
        std::printf("base attached at edge %d\n", net.attach_edge);
        std::printf("%zu faces, net area %.12f, surface area %.12f\n", net.cap_net.faces.size(), net.net_area,
                    net.surface_area);
    } catch (const capunfold::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 0;
}
