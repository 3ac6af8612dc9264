// decl: dispatch id arg handler
int dispatch(int id, void *arg)
{
    handler_fn handler;
    if (id < 0 || id >= NUM_HANDLERS)
        return -1;
    handler = handlers[id];
    return handler ? handler(arg) : 0;
}
