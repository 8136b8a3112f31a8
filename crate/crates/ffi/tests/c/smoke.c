#include <stdio.h>
#include <string.h>
#include "graphcrop.h"

#define CHECK(expr) do { if (!(expr)) { fprintf(stderr, "failed: %s\n", #expr); return 1; } } while (0)

int main(void) {
    size_t pairs[] = {0, 1, 1, 2, 2, 3, 3, 4};
    GcGraph *g = NULL;
    CHECK(gc_graph_from_edges(5, pairs, 4, &g) == GC_STATUS_OK);
    CHECK(gc_graph_edge_count(g) == 4);

    GcAugmentConfig cfg = gc_augment_config_default();
    cfg.rho = 0.6;
    GcCrop *crop = NULL;
    CHECK(gc_graph_crop(g, 2, &cfg, &crop) == GC_STATUS_OK);
    size_t kept[3], written = 0;
    CHECK(gc_crop_kept_ids(crop, kept, 3, &written) == GC_STATUS_OK);
    CHECK(written == 3 && kept[0] == 1 && kept[1] == 2 && kept[2] == 3);
    CHECK(gc_crop_kept_ids(crop, kept, 2, &written) == GC_STATUS_BUFFER_TOO_SMALL);
    gc_crop_free(crop);

    CHECK(gc_graph_crop(g, 7, &cfg, &crop) == GC_STATUS_USAGE);
    CHECK(strlen(gc_last_error_message()) > 0);
    CHECK(gc_graph_crop(NULL, 0, &cfg, &crop) == GC_STATUS_NULL_POINTER);

    gc_graph_free(g);
    puts("ok");
    return 0;
}
