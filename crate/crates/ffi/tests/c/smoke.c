#include <stdio.h>
#include <string.h>

#include "dodeca.h"

int main(void) {
    DodecaWedge *wedge = NULL;
    if (dodeca_wedge_new(&wedge) != DODECA_STATUS_OK) return 1;

    char *o2 = NULL;
    if (dodeca_wedge_fixed_point(wedge, 2, &o2) != DODECA_STATUS_OK) return 2;
    uint64_t period = 0;
    if (dodeca_wedge_period(wedge, o2, 100, &period) != DODECA_STATUS_OK || period != 1) return 3;

    DodecaComponent *component = NULL;
    if (dodeca_component_find(wedge, o2, 1000000, &component) != DODECA_STATUS_OK) return 4;
    size_t vertices = dodeca_component_vertex_count(component);
    dodeca_component_free(component);
    dodeca_string_free(o2);

    char *next = NULL;
    if (dodeca_wedge_step(wedge, "nonsense", false, &next, NULL) != DODECA_STATUS_PARSE) return 5;
    const char *message = dodeca_last_error_message();
    if (message == NULL || strstr(message, "byte") == NULL) return 6;

    DodecaPeriodSet *set = NULL;
    if (dodeca_periods_new(100, &set) != DODECA_STATUS_OK) return 7;
    size_t count = dodeca_periods_len(set);
    dodeca_periods_free(set);
    dodeca_wedge_free(wedge);

    printf("version=%s vertices=%zu periods=%zu\n", dodeca_version(), vertices, count);
    return 0;
}
