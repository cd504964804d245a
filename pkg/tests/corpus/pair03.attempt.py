def countdown(n):
    while n > 0:
        print(n)
    print('done')
